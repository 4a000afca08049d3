#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "sphereval/bodies.hpp"
#include "sphereval/counterexample.hpp"

using namespace sphereval;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {
constexpr double kPi = std::numbers::pi;

VectorXd e1(int n) {
    VectorXd v = VectorXd::Zero(n);
    v(0) = 1;
    return v;
}

VectorXd cap_point(std::mt19937_64& rng, double lo, int n) {
    std::uniform_real_distribution<double> u(lo, 1.0);
    std::normal_distribution<double> nd;
    VectorXd dir(n - 1);
    for (int j = 0; j < n - 1; ++j) dir(j) = nd(rng);
    dir.normalize();
    VectorXd xi(n);
    xi(0) = u(rng);
    xi.tail(n - 1) = std::sqrt(1.0 - xi(0) * xi(0)) * dir;
    return xi;
}

} // namespace

TEST_CASE("mu_cone closed form") {
    CHECK(mu_cone(e1(3), 1.0, 3) == doctest::Approx(-kPi / 2).epsilon(1e-14));
    CHECK(mu_cone(e1(4), 2.0, 4) == doctest::Approx(-32 * kPi / 15).epsilon(1e-14));

    VectorXd e2 = VectorXd::Zero(4);
    e2(1) = 1;
    CHECK(mu_cone(e2, 3.0, 4) == doctest::Approx(0.0));
}

TEST_CASE("mu_cone vs quadrature oracle") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> lam(1.0, 8.0);
    auto p = [](const Eigen::Ref<const VectorXd>& x) { return std::pow(x(0), 3); };
    for (int n : {3, 4}) {
        for (int i = 0; i < 10; ++i) {
            const VectorXd xi = cap_point(rng, 0.6, n);
            const double l = lam(rng);
            const double closed = mu_cone(xi, l, n);
            const double quad = measure_pair(cone_area_measure(xi, l, n), p, 256);
            CHECK(std::abs(closed - quad) <= 1e-3 * std::max(1e-6, std::abs(closed)));
        }
    }
}

TEST_CASE("mu scaling identity") {
    // t-dilation of a polytope cone multiplies the x1^3 pairing by t^{n-1}
    auto p = [](const Eigen::Ref<const VectorXd>& x) { return std::pow(x(0), 3); };
    const double t = 1.5;
    std::vector<VectorXd> verts = {Vector3d(0, 0, 0)}, scaled = {Vector3d(0, 0, 0)};
    for (int j = 0; j < 256; ++j) {
        const double th = 2 * kPi * j / 256;
        const Vector3d v(-1, std::cos(th), std::sin(th));
        verts.push_back(v);
        scaled.push_back(t * v);
    }
    const double base = measure_pair(polytope_area_measure(verts), p);
    const double dil = measure_pair(polytope_area_measure(scaled), p);
    CHECK(dil == doctest::Approx(t * t * base).epsilon(1e-10));
}

TEST_CASE("verify_estimate") {
    std::mt19937_64 rng(5);
    std::vector<VectorXd> cap;
    for (int i = 0; i < 500; ++i) cap.push_back(cap_point(rng, 0.92, 4));
    const auto good = verify_estimate(0.92, {2, 4, 8, 16}, cap, 4);
    CHECK(good.pass);
    CHECK(good.violations == 0);

    std::vector<VectorXd> loose = {(VectorXd(4) << 0.80, 0.6, 0, 0).finished()};
    const auto bad = verify_estimate(0.80, {2, 4, 8, 16}, loose, 4);
    CHECK_FALSE(bad.pass);

    // xi = e1 has margin factor >= 8/5 against the bound
    const double omega = unit_ball_volume(3);
    for (double l : {2.0, 4.0, 16.0}) {
        const double value = mu_cone(e1(4), l, 4);
        const double bound = -(omega / 2) * l;
        CHECK(value / bound >= 8.0 / 5 - 1e-12);
    }

    CHECK_THROWS_AS(verify_estimate(0.92, {1.5}, cap, 4), std::invalid_argument);
}

TEST_CASE("find_delta") {
    const double d4 = find_delta(4);
    CHECK(d4 == doctest::Approx(0.917).epsilon(1e-12));
    // defining equation holds just below the rounded value
    auto q4 = [](double t) { return t * (1 - t * t) - t * t * t; };
    CHECK(q4(d4) <= -0.625);
    CHECK(q4(d4 - 2e-3) > -0.625);

    CHECK(find_delta(5) == doctest::Approx(0.907).epsilon(1e-12));
    CHECK(find_delta(4) > 0.5);
    CHECK(find_delta(10) > 0.5);
}

TEST_CASE("cap_packing") {
    const long k = 256;
    const double eps = 4.0 / std::sqrt(1.0 + static_cast<double>(k) * k);
    const auto pts = cap_packing(0.916, eps, 4);
    CHECK(pts.size() == 1728); // M = 12 per axis

    double min_x1 = 1.0;
    for (const auto& xi : pts) {
        CHECK(std::abs(xi.norm() - 1.0) < 1e-12);
        min_x1 = std::min(min_x1, xi(0));
    }
    CHECK(min_x1 >= 0.916);

    double min_dist = 10.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            min_dist = std::min(min_dist, (pts[i] - pts[j]).norm());
    CHECK(min_dist >= eps - 1e-14);

    CHECK_THROWS_AS(cap_packing(0.916, 1.0, 4), EmptyPacking);
}

TEST_CASE("f_k fields") {
    const long k = 32;
    const double p = 7.0 / 6.0;
    const double delta = find_delta(4);
    const double eps = 4.0 / std::sqrt(1.0 + static_cast<double>(k) * k);
    const auto pts = cap_packing(delta, eps, 4);
    REQUIRE(!pts.empty());

    const ScalarField generic = f_k_field(k, pts, p);
    const ScalarField packed = f_k_field_packed(k, delta, p);

    const double kp = std::pow(static_cast<double>(k), -p);
    CHECK(eval(generic, pts.front()) == doctest::Approx(-kp).epsilon(1e-12));
    CHECK(eval(packed, pts.front()) == doctest::Approx(-kp).epsilon(1e-12));
    CHECK(eval(packed, -e1(4)) == 0.0);

    std::mt19937_64 rng(77);
    std::normal_distribution<double> nd;
    TieCounter t1, t2;
    for (int i = 0; i < 500; ++i) {
        VectorXd x(4);
        for (int j = 0; j < 4; ++j) x(j) = nd(rng);
        x.normalize();
        CHECK(std::abs(eval(generic, x) - eval(packed, x)) < 1e-14);
        CHECK((bar_grad(generic, x, &t1) - bar_grad(packed, x, &t2)).norm() < 1e-12);
    }
    // near-support points exercise the disk branch
    for (const auto& xi : {pts.front(), pts.back()}) {
        for (int i = 0; i < 50; ++i) {
            VectorXd x = xi;
            for (int j = 0; j < 4; ++j) x(j) += 0.5 * eps * nd(rng);
            x.normalize();
            CHECK(std::abs(eval(generic, x) - eval(packed, x)) < 1e-14);
            CHECK((bar_grad(generic, x, &t1) - bar_grad(packed, x, &t2)).norm() < 1e-12);
        }
    }

    // support disjointness: packing spacing exceeds the support diameter
    CHECK(2.0 * std::sqrt(2.0) / std::sqrt(1.0 + static_cast<double>(k) * k) < eps);
}

TEST_CASE("nu_fk") {
    const double p = 7.0 / 6.0;
    const double single = nu_fk(2, {e1(4)}, p, 4);
    CHECK(single == doctest::Approx(std::pow(2.0, -3.5) * 32 * kPi / 15).epsilon(1e-12));

    const double delta = find_delta(4);
    double prev = 0.0;
    for (long k : {32L, 64L, 128L, 256L}) {
        const double eps = 4.0 / std::sqrt(1.0 + static_cast<double>(k) * k);
        const auto pts = cap_packing(delta, eps, 4);
        const double nu = nu_fk(k, pts, p, 4);
        CHECK(nu > 0.0); // convention nu(psi) = -mu(C) with mu < 0 in the cap
        CHECK(nu > prev);
        prev = nu;
    }
}

TEST_CASE("sweep and exponents") {
    const auto grid = monte_carlo_grid(4, 100000, 1);
    SweepConfig cfg;
    cfg.n = 4;
    cfg.p = 7.0 / 6.0;
    cfg.k_values = {32, 64, 128, 256};
    cfg.grid = &grid;
    const auto records = sweep(cfg);
    REQUIRE(records.size() == 4);
    for (const auto& r : records) {
        CHECK(r.packing_size >= 1);
        CHECK(r.nu_fk > 0.0);
        CHECK(r.sup_norm_fk == doctest::Approx(std::pow(r.k, -cfg.p)).epsilon(1e-12));
        CHECK(r.lip_est_fk > 0.0);
        CHECK(r.d_tau_to_zero > 0.0);
    }
    CHECK(fit_exponent(records, SweepColumn::SupNorm) == doctest::Approx(-7.0 / 6).epsilon(1e-6));
    const double enu = fit_exponent(records, SweepColumn::Nu);
    CHECK(enu > 0.2);
    CHECK(enu < 0.8);

    CHECK_THROWS_AS(fit_exponent({records.front()}, SweepColumn::Nu), std::invalid_argument);

    SweepConfig badp = cfg;
    badp.p = 2.0;
    CHECK_THROWS_AS(sweep(badp), std::invalid_argument);
}

TEST_CASE("tau convergence of the witness sequence") {
    const auto grid = monte_carlo_grid(4, 100000, 2);
    const double delta = find_delta(4);
    std::vector<ScalarField> seq;
    for (long k = 32; k <= 256; k *= 2) seq.push_back(f_k_field_packed(k, delta, 7.0 / 6.0));
    const TauReport rep = tau_check(seq, constant(4, 0.0), grid);
    CHECK(rep.verdict);
    CHECK(rep.gradient_linf_bound < 2.0);
    CHECK(rep.uniform_sup_deviation < 1e-2);
}
