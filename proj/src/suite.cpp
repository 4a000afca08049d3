#include "sphereval/suite.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "sphereval/bodies.hpp"
#include "sphereval/counterexample.hpp"
#include "sphereval/valuations.hpp"

namespace sphereval {

namespace {

constexpr double kPi = std::numbers::pi;

using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

int worker_cap() {
    if (const char* env = std::getenv("SPHEREVAL_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const int workers = std::min<std::size_t>(worker_cap(), count);
    std::atomic<std::size_t> next{0};
    auto run = [&]() {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

VectorXd random_unit(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd;
    VectorXd v(n);
    do {
        for (int i = 0; i < n; ++i) v(i) = nd(rng);
    } while (v.norm() < 1e-3);
    return v.normalized();
}

/// random min/max tree of disk supports, 2-3 leaves
ScalarField random_disk_tree(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> lam(1.0, 3.0);
    std::uniform_int_distribution<int> leaves(2, 3), coin(0, 1);
    std::vector<ScalarField> fs;
    const int count = leaves(rng);
    for (int i = 0; i < count; ++i) fs.push_back(disk_support(random_unit(rng, n), lam(rng)));
    return coin(rng) ? meet(fs) : join(fs);
}

/// random polynomial field of degree <= 3 on S^2
ScalarField random_poly(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(-0.5, 0.5);
    std::vector<Monomial> terms = {{1.0 + c(rng), {0, 0, 0}}};
    for (int i = 0; i < 3; ++i) {
        Monomial m{c(rng), {0, 0, 0}};
        m.exps[i] = 1;
        terms.push_back(m);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            Monomial m{c(rng), {0, 0, 0}};
            ++m.exps[i];
            ++m.exps[j];
            terms.push_back(m);
        }
    Monomial cubic{c(rng), {1, 1, 1}};
    terms.push_back(cubic);
    return poly_field(3, terms);
}

VectorXd random_cap_point(std::mt19937_64& rng, double delta, int n) {
    std::uniform_real_distribution<double> u(delta, 1.0);
    const double x1 = u(rng);
    const VectorXd dir = random_unit(rng, n - 1);
    VectorXd xi(n);
    xi(0) = x1;
    xi.tail(n - 1) = std::sqrt(1.0 - x1 * x1) * dir;
    return xi;
}

SuiteCase finish(std::string name, double worst_ratio, std::string detail) {
    SuiteCase c;
    c.name = std::move(name);
    c.residual = worst_ratio;
    c.tol = 1.0;
    c.pass = worst_ratio <= 1.0;
    c.detail = std::move(detail);
    return c;
}

ScalarFn x1_cubed() {
    return [](const Eigen::Ref<const VectorXd>& x) { return std::pow(x(0), 3); };
}

SuiteCase criterion1_cone_measure() {
    const AreaMeasure am = cone_area_measure(Vector3d(1, 0, 0), 1.0, 3);
    const double exact = -kPi / 2;
    const double quad = measure_pair(am, x1_cubed(), 512);

    std::vector<VectorXd> verts = {Vector3d(0, 0, 0)};
    const int m = 4096;
    for (int j = 0; j < m; ++j) {
        const double th = 2 * kPi * j / m;
        verts.push_back(Vector3d(-1, std::cos(th), std::sin(th)));
    }
    const double oracle = measure_pair(polytope_area_measure(verts), x1_cubed());
    const double lateral = am.total_mass(512) - kPi;

    const double r1 = std::abs(quad - exact) / 1e-6;
    const double r2 = std::abs(quad - oracle) / 5e-3;
    const double r3 = std::abs(lateral - std::sqrt(2.0) * kPi) / 1e-10;
    std::ostringstream d;
    d << "pairing " << quad << " (exact " << exact << ", polytope oracle " << oracle
      << "), lateral mass " << lateral;
    return finish("cone measure correctness", std::max({r1, r2, r3}), d.str());
}

SuiteCase criterion2_estimate() {
    const double delta = find_delta(4);
    std::mt19937_64 rng(20240201);
    std::vector<VectorXd> cap, loose;
    for (int i = 0; i < 500; ++i) cap.push_back(random_cap_point(rng, delta, 4));
    for (int i = 0; i < 500; ++i) loose.push_back(random_cap_point(rng, 0.80, 4));
    loose.push_back((VectorXd(4) << 0.80, 0.6, 0, 0).finished());

    const std::vector<double> lams = {2, 4, 8, 16};
    const EstimateReport good = verify_estimate(delta, lams, cap, 4);
    const EstimateReport control = verify_estimate(0.80, lams, loose, 4);

    const double ratio = (good.pass && !control.pass) ? 0.0 : 2.0;
    std::ostringstream d;
    d << "delta " << delta << ", cap margin " << good.worst_margin << ", control violations "
      << control.violations;
    return finish("estimate lemma", ratio, d.str());
}

SuiteCase criterion3_sweep(const std::vector<SweepRecord>& records) {
    const double e_nu = fit_exponent(records, SweepColumn::Nu);
    const double e_sup = fit_exponent(records, SweepColumn::SupNorm);
    const double e_lip = fit_exponent(records, SweepColumn::LipEst);

    auto outside = [](double v, double lo, double hi) {
        return std::max({0.0, (lo - v) / (hi - lo), (v - hi) / (hi - lo)});
    };
    const double r1 = outside(e_nu, 0.35, 0.65);
    const double r2 = outside(e_sup, -7.0 / 6 - 0.01, -7.0 / 6 + 0.01);
    const double r3 = outside(e_lip, -0.27, -0.06);
    std::ostringstream d;
    d << "exponents nu " << e_nu << " sup " << e_sup << " lip " << e_lip;
    return finish("divergence sweep", std::max({r1, r2, r3}) > 0 ? 2.0 : 0.0, d.str());
}

SuiteCase criterion4_tau(const QuadratureGrid& grid, double delta, double p) {
    std::vector<ScalarField> seq;
    for (long k = 32; k <= 1024; k *= 2) seq.push_back(f_k_field_packed(k, delta, p));
    const TauReport rep = tau_check(seq, constant(4, 0.0), grid);
    const double ratio = (rep.verdict && rep.gradient_linf_bound < 2.0) ? 0.0 : 2.0;
    std::ostringstream d;
    d << "sup dev " << rep.uniform_sup_deviation << ", grad L1 dev " << rep.gradient_l1_deviation
      << ", lip bound " << rep.gradient_linf_bound << ", ties " << rep.ties;
    return finish("tau convergence of the witness", ratio, d.str());
}

SuiteCase criterion5_valuation_property() {
    const QuadratureGrid grid = icosphere_grid(5);
    const std::vector<std::pair<std::string, Valuation>> mus = {
        {"theta1", make_theta1(poly_field(3, {{3.0, {2, 0, 0}}, {-1.0, {0, 0, 0}}}))},
        {"theta2", make_theta2(even_density(3))},
        {"rotinv", make_rotinv(1.0, 1.0, 1.0)},
        {"hess_s2", make_hess_s2(poly_field(3, {{0.5, {0, 0, 0}}, {1.0, {1, 1, 1}}}))},
    };
    std::mt19937_64 seeds(777);
    std::vector<std::uint64_t> pair_seed(100);
    for (auto& s : pair_seed) s = seeds();

    double worst = 0.0;
    std::string worst_case = "none";
    for (const auto& [name, mu] : mus) {
        std::vector<double> ratios(pair_seed.size(), 0.0);
        parallel_for(pair_seed.size(), [&](std::size_t i) {
            std::mt19937_64 rng(pair_seed[i]);
            const ScalarField f = random_disk_tree(rng, 3);
            const ScalarField h = random_disk_tree(rng, 3);
            const CheckReport rep = check_valuation_property(mu, f, h, grid, 1e-6);
            ratios[i] = rep.residual / (rep.tol * rep.scale);
        });
        for (std::size_t i = 0; i < ratios.size(); ++i)
            if (ratios[i] > worst) {
                worst = ratios[i];
                worst_case = name + " pair " + std::to_string(i);
            }
    }
    return finish("valuation property battery", worst, "worst: " + worst_case);
}

SuiteCase criterion6_dual_invariance() {
    // polynomial fields on a product-Gauss grid: the invariance integrals are
    // spherical polynomials, integrated exactly
    const QuadratureGrid grid = product_gauss_grid(24);
    const Valuation t2 = make_theta2(even_density(3));
    const Valuation t1 = make_theta1(poly_field(3, {{3.0, {2, 0, 0}}, {-1.0, {0, 0, 0}}}));

    std::mt19937_64 rng(4242);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const ScalarField f = random_poly(rng);
        const VectorXd v = random_unit(rng, 3);
        for (const Valuation* mu : {&t1, &t2}) {
            const CheckReport rep = check_dual_invariance(*mu, f, v, grid, 1e-5);
            worst = std::max(worst, rep.residual / (rep.tol * rep.scale));
        }
    }

    // negative controls
    const Valuation bad1 = make_theta1(poly_field(3, {{1.0, {1, 0, 0}}}));
    const CheckReport c1 =
        check_dual_invariance(bad1, constant(3, 0.0), Vector3d(1, 0, 0), grid, 1e-5);
    const double r1 = std::abs(c1.residual - 4 * kPi / 3) / 1e-3;

    MatrixDensity identity;
    identity.ambient_dim = 3;
    identity.value = [](const Eigen::Ref<const VectorXd>& x) {
        return Eigen::MatrixXcd::Identity(x.size(), x.size()).eval();
    };
    const double cond =
        theta2_condition_residual(identity, grid, {linear(Vector3d(1, 0, 0))});
    const double r2 = std::abs(cond - 4 * kPi) / 1e-3;

    std::ostringstream d;
    d << "worst pass-ratio " << worst << ", control residuals " << c1.residual << " and " << cond;
    return finish("dual translation invariance", std::max({worst, r1, r2}), d.str());
}

SuiteCase criterion7_even_identity() {
    const QuadratureGrid grid = icosphere_grid(5);
    const MatrixDensity even = even_density(3);
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const ScalarField f = random_poly(rng);
        const std::complex<double> a = theta2_eval(even, f, grid);
        const std::complex<double> b = rotinv_eval(0.0, 0.0, 1.0, f, grid);
        worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)) / 1e-6);
    }
    const double r = 1.7;
    const std::complex<double> ball = rotinv_eval(0.0, 0.0, 1.0, constant(3, r), grid);
    const double rb = std::abs(ball - 8.0 * kPi * r * r) / 1e-10;
    std::ostringstream d;
    d << "ball value " << ball.real() << " vs " << 8 * kPi * r * r;
    return finish("theta2 equals intrinsic-volume integrand", std::max(worst, rb), d.str());
}

SuiteCase criterion8_odd_witness() {
    const QuadratureGrid grid = product_gauss_grid(24);
    const ScalarField psi = poly_field(3, {{1.0, {1, 1, 1}}});
    const MatrixDensity odd = odd_density(psi);

    std::mt19937_64 rng(5150);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const ScalarField f = random_poly(rng);
        const std::complex<double> lhs = theta2_eval(odd, f, grid);
        const std::complex<double> rhs = hess_s2_eval(psi, f, grid);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1e-3, std::abs(rhs)) / 1e-5);
    }
    // support function of an asymmetric smooth body: nonvanishing witness
    const ScalarField h = poly_field(3, {{1.0, {0, 0, 0}},
                                         {0.15, {1, 0, 0}},
                                         {0.2, {1, 1, 0}},
                                         {0.1, {0, 1, 1}},
                                         {0.1, {0, 0, 3}}});
    const std::complex<double> witness = hess_s2_eval(psi, h, grid);
    const double rw = std::abs(witness) > 1e-8 ? 0.0 : 2.0;
    std::ostringstream d;
    d << "witness value " << witness.real();
    return finish("odd degree-2 witness", std::max(worst, rw), d.str());
}

SuiteCase criterion9_degree_fit() {
    const QuadratureGrid grid = icosphere_grid(4);
    const std::vector<double> ts = {0.5, 1.0, 1.5, 2.0, 2.5};
    const Valuation t1 = make_theta1(poly_field(3, {{3.0, {2, 0, 0}}, {-1.0, {0, 0, 0}}}));
    const Valuation t2 = make_theta2(even_density(3));
    const Valuation ri = make_rotinv(1.0, 1.0, 1.0);

    std::mt19937_64 rng(99);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const ScalarField f = random_disk_tree(rng, 3);
        const DegreeFit fr = fit_degree(ri, f, ts, grid);
        worst = std::max(worst, fr.truncation_residual / (1e-8 * std::max(1.0, fr.scale)));
        const DegreeFit f1 = fit_degree(t1, f, ts, grid);
        for (int j = 0; j < f1.coefficients.size(); ++j)
            if (j != 1)
                worst = std::max(worst, std::abs(f1.coefficients(j)) /
                                            (1e-8 * std::max(1.0, f1.scale)));
        const DegreeFit f2 = fit_degree(t2, f, ts, grid);
        for (int j = 0; j < f2.coefficients.size(); ++j)
            if (j != 2)
                worst = std::max(worst, std::abs(f2.coefficients(j)) /
                                            (1e-8 * std::max(1.0, f2.scale)));
    }
    return finish("degree fitting", worst, "");
}

SuiteCase criterion10_equivariance() {
    std::mt19937_64 rng(31337);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        MatrixXd g(3, 3);
        do {
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) g(r, c) = nd(rng);
        } while (std::abs(g.determinant()) < 0.1);
        const ScalarField f = random_disk_tree(rng, 3);
        const VectorXd x = random_unit(rng, 3);

        TieCounter tc;
        const VectorXd lhs = bar_grad(gl_act(g, f), x, &tc);
        const VectorXd u = (g.transpose() * x).normalized();
        const VectorXd rhs = g * bar_grad(f, u, &tc);
        worst = std::max(worst, (lhs - rhs).norm() / 1e-10);

        // support function equivariance on polytopes, separate code paths
        std::vector<VectorXd> verts, gverts;
        for (int v = 0; v < 6; ++v) {
            verts.push_back(random_unit(rng, 3) * (1.0 + 0.5 * std::abs(nd(rng))));
            gverts.push_back(g * verts.back());
        }
        const ScalarField hk = support_field(Polytope{verts});
        const ScalarField hgk = support_field(Polytope{gverts});
        const ScalarField acted = gl_act(g, hk);
        const VectorXd y = random_unit(rng, 3);
        worst = std::max(worst, std::abs(eval(hgk, y) - eval(acted, y)) / 1e-10);
    }
    return finish("GL equivariance", worst, "");
}

} // namespace

std::vector<SuiteCase> run_acceptance() {
    std::vector<SuiteCase> out;
    out.push_back(criterion1_cone_measure());
    out.push_back(criterion2_estimate());

    const QuadratureGrid mc = monte_carlo_grid(4, 1000000, 42);
    const double delta = find_delta(4);
    const double p = 7.0 / 6.0;
    SweepConfig cfg;
    cfg.n = 4;
    cfg.delta = delta;
    cfg.p = p;
    cfg.grid = &mc;
    out.push_back(criterion3_sweep(sweep(cfg)));
    out.push_back(criterion4_tau(mc, delta, p));

    out.push_back(criterion5_valuation_property());
    out.push_back(criterion6_dual_invariance());
    out.push_back(criterion7_even_identity());
    out.push_back(criterion8_odd_witness());
    out.push_back(criterion9_degree_fit());
    out.push_back(criterion10_equivariance());
    return out;
}

} // namespace sphereval
