#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "sphereval/valuations.hpp"

using namespace sphereval;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;
using std::complex;

namespace {
constexpr double kPi = std::numbers::pi;

VectorXd random_unit(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd;
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = nd(rng);
    return v.normalized();
}

ScalarField random_poly(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(-0.5, 0.5);
    std::vector<Monomial> terms = {{1.0 + c(rng), {0, 0, 0}},
                                   {c(rng), {1, 0, 0}},
                                   {c(rng), {0, 1, 1}},
                                   {c(rng), {2, 0, 0}},
                                   {c(rng), {1, 1, 1}}};
    return poly_field(3, terms);
}

ScalarField zonal2() { // 3 x1^2 - 1, orthogonal to constants' complement... to linears
    return poly_field(3, {{3.0, {2, 0, 0}}, {-1.0, {0, 0, 0}}});
}

} // namespace

TEST_CASE("theta1 examples") {
    auto gauss = product_gauss_grid(12);
    CHECK(theta1_eval(constant(3, 1.0), constant(3, 2.5), gauss).real() ==
          doctest::Approx(10 * kPi).epsilon(1e-12));
    CHECK(std::abs(theta1_eval(zonal2(), linear(Vector3d(0.3, -1, 2)), gauss)) < 1e-12);
    CHECK(theta1_eval(poly_field(3, {{1.0, {1, 0, 0}}}), linear(Vector3d(1, 0, 0)), gauss).real() ==
          doctest::Approx(4 * kPi / 3).epsilon(1e-12));
}

TEST_CASE("theta2 and rotinv examples") {
    auto gauss = product_gauss_grid(12);
    auto even = even_density(3);
    CHECK(theta2_eval(even, constant(3, 1.0), gauss).real() ==
          doctest::Approx(8 * kPi).epsilon(1e-12));
    CHECK(std::abs(theta2_eval(even, linear(Vector3d(0.5, 1, -2)), gauss)) < 1e-10);
    CHECK(std::abs(theta2_eval(even, constant(3, 0.0), gauss)) == 0.0);

    CHECK(rotinv_eval(0.0, 0.0, 1.0, constant(3, 2.0), gauss).real() ==
          doctest::Approx(32 * kPi).epsilon(1e-12));
    std::mt19937_64 rng(1);
    CHECK(rotinv_eval(1.0, 0.0, 0.0, random_poly(rng), gauss) == complex<double>(1.0));
    CHECK(std::abs(rotinv_eval(0.0, 0.0, 1.0, linear(Vector3d(1, 1, 0)), gauss)) < 1e-10);
}

TEST_CASE("area valuation") {
    auto p = [](const Eigen::Ref<const VectorXd>& x) { return std::pow(x(0), 3); };
    CHECK(std::abs(area_valuation_eval(p, Ball{1.0})) < 1e-10);
    CHECK(area_valuation_eval(p, Disk{Vector3d(1, 0, 0), 2.0}) == complex<double>(0.0));
    VectorXd e1 = VectorXd::Zero(4);
    e1(0) = 1;
    CHECK(area_valuation_eval(p, Cone{e1, 2.0}).real() ==
          doctest::Approx(-32 * kPi / 15).epsilon(1e-8));
}

TEST_CASE("hess_s2 examples") {
    auto gauss = product_gauss_grid(16);
    CHECK(hess_s2_eval(constant(3, 1.0), constant(3, 1.0), gauss).real() ==
          doctest::Approx(8 * kPi).epsilon(1e-12));
    CHECK(std::abs(hess_s2_eval(poly_field(3, {{1.0, {1, 1, 1}}}), constant(3, 1.0), gauss)) <
          1e-12);

    // hess_s2 with psi = 1 is twice the surface area of the body with support h
    ScalarField h = poly_field(3, {{1.0, {0, 0, 0}}, {0.1, {0, 0, 2}}});
    AreaMeasure s;
    s.ambient_dim = 3;
    s.smooth_parts.push_back(SmoothPart{h});
    auto one = [](const Eigen::Ref<const VectorXd>&) { return 1.0; };
    const double area = measure_pair(s, one, 256, &gauss);
    CHECK(hess_s2_eval(constant(3, 1.0), h, gauss).real() ==
          doctest::Approx(2 * area).epsilon(1e-10));
}

TEST_CASE("even density identities") {
    auto even = even_density(3);
    std::mt19937_64 rng(7);
    const VectorXd x = random_unit(rng, 3);
    const MatrixXcd m = even.value(x);
    CHECK((m - m.transpose()).norm() < 1e-12);
    // <Phi x, x> = n - 1 at unit x
    CHECK(std::abs(x.cast<complex<double>>().dot(m * x.cast<complex<double>>()) - 2.0) < 1e-12);

    auto grid = icosphere_grid(4);
    for (int i = 0; i < 20; ++i) {
        const ScalarField f = random_poly(rng);
        const complex<double> a = theta2_eval(even, f, grid);
        const complex<double> b = rotinv_eval(0.0, 0.0, 1.0, f, grid);
        CHECK(std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("odd density") {
    const ScalarField psi = poly_field(3, {{1.0, {1, 1, 1}}});
    const MatrixDensity odd = odd_density(psi);
    CHECK(odd.odd);

    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) {
        const VectorXd x = random_unit(rng, 3);
        CHECK((odd.value(-x) + odd.value(x)).norm() < 1e-12);
        const MatrixXcd m = odd.value(x);
        CHECK((m - m.transpose()).norm() < 1e-12);
    }

    auto gauss = product_gauss_grid(24);
    for (int i = 0; i < 10; ++i) {
        const ScalarField f = random_poly(rng);
        const complex<double> lhs = theta2_eval(odd, f, gauss);
        const complex<double> rhs = hess_s2_eval(psi, f, gauss);
        CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(rhs)));
    }

    // negated density must break the defining identity
    MatrixDensity flipped = odd;
    auto base = odd.value;
    flipped.value = [base](const Eigen::Ref<const VectorXd>& x) { return (-base(x)).eval(); };
    const ScalarField probe = poly_field(3, {{1.0, {0, 0, 0}},
                                             {0.3, {1, 1, 0}},
                                             {0.2, {0, 0, 3}},
                                             {0.15, {0, 1, 1}},
                                             {0.1, {1, 0, 1}}});
    const complex<double> lhs = theta2_eval(flipped, probe, gauss);
    const complex<double> rhs = hess_s2_eval(psi, probe, gauss);
    CHECK(std::abs(lhs - rhs) > 1e-4 * std::max(1.0, std::abs(rhs)));
}

TEST_CASE("valuation property") {
    auto grid = icosphere_grid(4);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> lam(1.0, 3.0);
    auto rand_tree = [&]() {
        std::vector<ScalarField> fs = {disk_support(random_unit(rng, 3), lam(rng)),
                                       disk_support(random_unit(rng, 3), lam(rng))};
        return (rng() & 1) ? meet(fs) : join(fs);
    };

    const Valuation t2 = make_theta2(even_density(3));
    for (int i = 0; i < 20; ++i) {
        const auto rep = check_valuation_property(t2, rand_tree(), rand_tree(), grid, 1e-6);
        CHECK(rep.pass);
    }

    const ScalarField f = rand_tree();
    CHECK(check_valuation_property(t2, f, f, grid, 1e-12).residual ==
          doctest::Approx(0.0).epsilon(1e-12));

    const Valuation lin = make_rotinv(0.0, 1.0, 0.0);
    const auto rep = check_valuation_property(lin, rand_tree(), rand_tree(), grid, 1e-10);
    CHECK(rep.pass);

    const Valuation hs = make_hess_s2(poly_field(3, {{0.5, {0, 0, 0}}, {1.0, {1, 1, 1}}}));
    for (int i = 0; i < 10; ++i) {
        const auto r = check_valuation_property(hs, rand_tree(), rand_tree(), grid, 1e-6);
        CHECK(r.pass);
    }
}

TEST_CASE("dual invariance") {
    auto gauss = product_gauss_grid(20);
    std::mt19937_64 rng(23);

    const Valuation good1 = make_theta1(zonal2());
    const Valuation good2 = make_theta2(even_density(3));
    for (int i = 0; i < 10; ++i) {
        const ScalarField f = random_poly(rng);
        const VectorXd v = random_unit(rng, 3);
        CHECK(check_dual_invariance(good1, f, v, gauss, 1e-6).pass);
        CHECK(check_dual_invariance(good2, f, v, gauss, 1e-5).pass);
    }

    const Valuation bad = make_theta1(poly_field(3, {{1.0, {1, 0, 0}}}));
    const auto rep = check_dual_invariance(bad, constant(3, 0.0), Vector3d(1, 0, 0), gauss, 1e-5);
    CHECK_FALSE(rep.pass);
    CHECK(rep.residual == doctest::Approx(4 * kPi / 3).epsilon(1e-10));
}

TEST_CASE("theta2 condition residual") {
    auto gauss = product_gauss_grid(20);
    std::vector<ScalarField> fields = {constant(3, 1.0), linear(Vector3d(1, 0, 0)),
                                       linear(Vector3d(0, 1, 0)), linear(Vector3d(0, 0, 1))};
    std::mt19937_64 rng(29);
    for (int i = 0; i < 3; ++i) fields.push_back(random_poly(rng));
    CHECK(theta2_condition_residual(even_density(3), gauss, fields) < 1e-10);

    // the disk-support kink degrades quadrature, but the continuum value is 0
    auto ico = icosphere_grid(5);
    std::vector<ScalarField> disks = {disk_support(Vector3d(1, 0, 0), 2.0),
                                      disk_support(random_unit(rng, 3), 1.5)};
    CHECK(theta2_condition_residual(even_density(3), ico, disks) < 1e-2);

    MatrixDensity ident;
    ident.ambient_dim = 3;
    ident.value = [](const Eigen::Ref<const VectorXd>& x) {
        return MatrixXcd::Identity(x.size(), x.size()).eval();
    };
    CHECK(theta2_condition_residual(ident, gauss, {linear(Vector3d(1, 0, 0))}) ==
          doctest::Approx(4 * kPi).epsilon(1e-10));
}

TEST_CASE("pde residual") {
    std::mt19937_64 rng(31);
    auto even = even_density(3);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i)
        worst = std::max(worst, pde_residual(even, random_unit(rng, 3)).maxCoeff());
    CHECK(worst < 1e-4);

    MatrixDensity ident;
    ident.ambient_dim = 3;
    ident.value = [](const Eigen::Ref<const VectorXd>& x) {
        return MatrixXcd::Identity(x.size(), x.size()).eval();
    };
    const VectorXd res = pde_residual(ident, Vector3d(0, 1, 0));
    CHECK(res(1) == doctest::Approx(3.0).epsilon(1e-3)); // n x_j at x = e_2, j = 2

    MatrixDensity zero;
    zero.ambient_dim = 3;
    zero.value = [](const Eigen::Ref<const VectorXd>& x) {
        return MatrixXcd::Zero(x.size(), x.size()).eval();
    };
    CHECK(pde_residual(zero, Vector3d(1, 0, 0)).maxCoeff() == 0.0);
}

TEST_CASE("degree fitting") {
    auto grid = icosphere_grid(3);
    const std::vector<double> ts = {0.5, 1.0, 1.5, 2.0, 2.5};
    std::mt19937_64 rng(37);
    const ScalarField f = meet(disk_support(random_unit(rng, 3), 2.0),
                               disk_support(random_unit(rng, 3), 1.5));

    const DegreeFit fr = fit_degree(make_rotinv(1.0, 1.0, 1.0), f, ts, grid);
    CHECK(fr.truncation_residual <= 1e-8 * std::max(1.0, fr.scale));

    const DegreeFit f1 = fit_degree(make_theta1(zonal2()), f, ts, grid);
    for (int j = 0; j < f1.coefficients.size(); ++j)
        if (j != 1) CHECK(std::abs(f1.coefficients(j)) <= 1e-8 * std::max(1.0, f1.scale));

    const DegreeFit f2 = fit_degree(make_theta2(even_density(3)), f, ts, grid);
    for (int j = 0; j < f2.coefficients.size(); ++j)
        if (j != 2) CHECK(std::abs(f2.coefficients(j)) <= 1e-8 * std::max(1.0, f2.scale));

    CHECK_THROWS_AS(fit_degree(make_rotinv(1, 0, 0), f, {1.0, 2.0}, grid),
                    std::invalid_argument);
}

TEST_CASE("parity") {
    auto grid = icosphere_grid(4);
    std::mt19937_64 rng(41);
    const MatrixXd neg = -MatrixXd::Identity(3, 3);
    const ScalarField f = random_poly(rng);
    const ScalarField fneg = gl_act(neg, f);

    const auto even = even_density(3);
    const complex<double> e1 = theta2_eval(even, f, grid);
    const complex<double> e2 = theta2_eval(even, fneg, grid);
    CHECK(std::abs(e1 - e2) <= 1e-8 * std::max(1.0, std::abs(e1)));

    const auto odd = odd_density(poly_field(3, {{1.0, {1, 1, 1}}}));
    const complex<double> o1 = theta2_eval(odd, f, grid);
    const complex<double> o2 = theta2_eval(odd, fneg, grid);
    CHECK(std::abs(o1 + o2) <= 1e-8 * std::max(1.0, std::abs(o1)));
}

TEST_CASE("trilinear symmetry") {
    // B(psi,f,h) = int psi dS2(H_f)[H_h]; f-h symmetry is pointwise, the
    // psi-f swap is integration by parts, exact on a Gauss grid for polys
    auto gauss = product_gauss_grid(24);
    auto bform = [&](const ScalarField& a, const ScalarField& b, const ScalarField& c) {
        return integrate(gauss, [&](const Eigen::Ref<const VectorXd>& x) {
            const MatrixXd hb = sph_hess(b, x);
            const MatrixXd hc = sph_hess(c, x);
            return eval(a, x) * (hb.trace() * hc.trace() - (hb * hc).trace());
        });
    };
    std::mt19937_64 rng(43);
    const ScalarField psi = random_poly(rng);
    const ScalarField f = random_poly(rng);
    const ScalarField h = random_poly(rng);
    const double ref = bform(psi, f, h);
    const double scale = std::max(1.0, std::abs(ref));
    CHECK(std::abs(bform(psi, h, f) - ref) <= 1e-10 * scale);
    CHECK(std::abs(bform(f, psi, h) - ref) <= 1e-8 * scale);
    CHECK(std::abs(bform(h, f, psi) - ref) <= 1e-8 * scale);
}

TEST_CASE("valuation dispatch errors") {
    auto grid = icosphere_grid(2);
    const Valuation ai = make_area_integral(
        [](const Eigen::Ref<const VectorXd>& x) { return std::pow(x(0), 3); });
    CHECK_THROWS_AS(valuation_eval(ai, constant(3, 1.0), grid), std::invalid_argument);
    CHECK_THROWS_AS(theta2_condition_residual(even_density(3), grid, {}), std::invalid_argument);
}
