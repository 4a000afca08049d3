#include "sphereval/counterexample.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace sphereval {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double mu_cone(const VectorXd& xi, double lambda, int n) {
    const double x1 = xi(0);
    const double omega = unit_ball_volume(n - 1);
    return omega * std::pow(lambda, n - 1) / (1.0 + lambda * lambda) *
           (3.0 * x1 * (1.0 - x1 * x1) / (n - 1) - x1 * x1 * x1);
}

EstimateReport verify_estimate(double delta, const std::vector<double>& lambda_samples,
                               const std::vector<VectorXd>& xi_samples, int n) {
    const double omega = unit_ball_volume(n - 1);
    EstimateReport rep;
    rep.worst_margin = -std::numeric_limits<double>::infinity();
    for (const VectorXd& xi : xi_samples) {
        if (xi(0) < delta - 1e-12)
            throw std::invalid_argument("verify_estimate: sample outside the cap");
        for (double lam : lambda_samples) {
            if (lam < 2.0) throw std::invalid_argument("verify_estimate: lambda >= 2 required");
            const double bound = -(omega / 2.0) * std::pow(lam, n - 3);
            const double margin = mu_cone(xi, lam, n) - bound;
            rep.worst_margin = std::max(rep.worst_margin, margin);
            if (margin > 0.0) ++rep.violations;
        }
    }
    rep.pass = rep.violations == 0;
    return rep;
}

double find_delta(int n) {
    auto q = [n](double t) { return 3.0 * t * (1.0 - t * t) / (n - 1) - t * t * t + 0.625; };
    double lo = 0.5, hi = 1.0;
    if (q(lo) <= 0.0 || q(hi) >= 0.0) throw NoRoot("find_delta: no sign change in (1/2, 1)");
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (q(mid) > 0.0 ? lo : hi) = mid;
    }
    return std::ceil(hi * 1000.0) / 1000.0;
}

std::vector<VectorXd> cap_packing(double delta, double eps, int n) {
    const double r = std::sqrt(1.0 - delta * delta);
    const double side = r / std::sqrt(static_cast<double>(n));
    const long m = static_cast<long>(std::floor(side / eps));
    if (m < 1) throw EmptyPacking("cap_packing: cube too small for this spacing");

    std::vector<VectorXd> out;
    const int d = n - 1;
    std::vector<long> idx(d, 0);
    while (true) {
        VectorXd xp(d);
        for (int j = 0; j < d; ++j) xp(j) = (idx[j] - 0.5 * (m - 1)) * eps;
        VectorXd xi(n);
        xi(0) = std::sqrt(1.0 - xp.squaredNorm());
        xi.tail(d) = xp;
        out.push_back(std::move(xi));
        int j = 0;
        for (; j < d; ++j) {
            if (++idx[j] < m) break;
            idx[j] = 0;
        }
        if (j == d) break;
    }
    return out;
}

ScalarField f_k_field(long k, const std::vector<VectorXd>& points, double p) {
    if (points.empty()) throw EmptyPacking("f_k_field: no packing points");
    const int n = static_cast<int>(points.front().size());
    std::vector<ScalarField> children = {constant(n, 0.0)};
    for (const VectorXd& xi : points)
        children.push_back(disk_support(xi, static_cast<double>(k)));
    return scale(std::pow(static_cast<double>(k), -p), meet(children));
}

namespace {

// min(0, min_i phi_{xi_i,k}) over the cap packing, with the active cap found
// by rounding the equatorial projection: the supports have chordal radius
// sqrt(2)/sqrt(1+k^2) < eps/2, so the nearest grid point is the only
// candidate.
class PackedCapMinNode final : public detail::FieldNode {
public:
    PackedCapMinNode(int n, double lambda, double eps, long m)
        : n_(n), lambda_(lambda), eps_(eps), m_(m) {}

    double eval(const Eigen::Ref<const VectorXd>& x) const override {
        VectorXd xi;
        if (!candidate(x, xi)) return 0.0;
        const double t = xi.dot(x);
        const double phi = lambda_ * (x - t * xi).norm() - t;
        return std::min(0.0, phi);
    }

    VectorXd bar_grad(const Eigen::Ref<const VectorXd>& x, TieCounter* ties) const override {
        VectorXd xi;
        if (!candidate(x, xi)) return VectorXd::Zero(n_);
        const double t = xi.dot(x);
        const VectorXd perp = x - t * xi;
        const double phi = lambda_ * perp.norm() - t;
        if (std::abs(phi) < kTieTol) {
            if (!ties) throw TieAtNode("packed min tie with the zero branch");
            ++ties->ties;
            return VectorXd::Zero(n_); // first child (the zero field) wins
        }
        if (phi > 0.0) return VectorXd::Zero(n_);
        return lambda_ / perp.norm() * perp - xi;
    }

    MatrixXd ext_hessian(const Eigen::Ref<const VectorXd>& x, TieCounter* ties,
                         bool strict) const override {
        if (strict) throw NotSmooth("packed cap min is piecewise smooth only");
        VectorXd xi;
        if (!candidate(x, xi)) return MatrixXd::Zero(n_, n_);
        const double t = xi.dot(x);
        const VectorXd perp = x - t * xi;
        const double r = perp.norm();
        const double phi = lambda_ * r - t;
        if (std::abs(phi) < kTieTol) {
            if (!ties) throw TieAtNode("packed min tie with the zero branch");
            ++ties->ties;
            return MatrixXd::Zero(n_, n_);
        }
        if (phi > 0.0) return MatrixXd::Zero(n_, n_);
        const MatrixXd p = MatrixXd::Identity(n_, n_) - xi * xi.transpose();
        const VectorXd u = perp / r;
        return lambda_ / r * (p - u * u.transpose());
    }

private:
    bool candidate(const Eigen::Ref<const VectorXd>& x, VectorXd& xi) const {
        const int d = n_ - 1;
        VectorXd xp(d);
        double norm2 = 0.0;
        for (int j = 0; j < d; ++j) {
            const double i = std::round(x(j + 1) / eps_ + 0.5 * (m_ - 1));
            if (i < 0.0 || i >= static_cast<double>(m_)) return false;
            xp(j) = (i - 0.5 * (m_ - 1)) * eps_;
            norm2 += xp(j) * xp(j);
        }
        xi.resize(n_);
        xi(0) = std::sqrt(1.0 - norm2);
        xi.tail(d) = xp;
        return true;
    }

    int n_;
    double lambda_, eps_;
    long m_;
};

} // namespace

ScalarField f_k_field_packed(long k, double delta, double p) {
    const int n = 4;
    const double eps = 4.0 / std::sqrt(1.0 + static_cast<double>(k) * k);
    const double r = std::sqrt(1.0 - delta * delta);
    const long m = static_cast<long>(std::floor(r / std::sqrt(static_cast<double>(n)) / eps));
    if (m < 1) throw EmptyPacking("f_k_field_packed: cube too small for this spacing");
    auto node = std::make_shared<PackedCapMinNode>(n, static_cast<double>(k), eps, m);
    return scale(std::pow(static_cast<double>(k), -p), ScalarField(n, std::move(node)));
}

double nu_fk(long k, const std::vector<VectorXd>& points, double p, int n) {
    std::vector<double> terms;
    terms.reserve(points.size());
    for (const VectorXd& xi : points) terms.push_back(-mu_cone(xi, static_cast<double>(k), n));
    const double sum = detail::pairwise_sum(terms, 0, terms.size());
    return std::pow(static_cast<double>(k), -p * (n - 1)) * sum;
}

namespace {

int worker_cap() {
    if (const char* env = std::getenv("SPHEREVAL_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

} // namespace

std::vector<SweepRecord> sweep(const SweepConfig& cfg) {
    if (!cfg.grid) throw std::invalid_argument("sweep: a grid for norm estimates is required");
    if (cfg.n != 4) throw UnsupportedScheme("sweep: n=4 only");
    const double upper = (2.0 * cfg.n - 4.0) / (cfg.n - 1);
    if (cfg.p <= 1.0 || cfg.p >= upper)
        throw std::invalid_argument("sweep: p outside (1, (2n-4)/(n-1))");
    const double delta = cfg.delta > 0.0 ? cfg.delta : find_delta(cfg.n);

    std::vector<long> ks = cfg.k_values;
    if (ks.empty())
        for (long k = 32; k <= 1024; k *= 2) ks.push_back(k);

    std::vector<SweepRecord> records(ks.size());
    std::vector<char> keep(ks.size(), 0);
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t i = next.fetch_add(1); i < ks.size(); i = next.fetch_add(1)) {
            const long k = ks[i];
            const double eps = 4.0 / std::sqrt(1.0 + static_cast<double>(k) * k);
            std::vector<VectorXd> points;
            try {
                points = cap_packing(delta, eps, cfg.n);
            } catch (const EmptyPacking&) {
                continue;
            }
            SweepRecord rec;
            rec.k = k;
            rec.packing_size = static_cast<long>(points.size());
            rec.nu_fk = nu_fk(k, points, cfg.p, cfg.n);

            const ScalarField f = f_k_field_packed(k, delta, cfg.p);
            TieCounter ties;
            double sup = sup_norm(f, *cfg.grid);
            for (const VectorXd& xi : points) sup = std::max(sup, std::abs(eval(f, xi)));
            rec.sup_norm_fk = sup;
            rec.lip_est_fk = lip_est(f, *cfg.grid, &ties);
            rec.d_tau_to_zero = d_tau(f, constant(cfg.n, 0.0), *cfg.grid, &ties);
            rec.tie_count = ties.ties;
            records[i] = rec;
            keep[i] = 1;
        }
    };
    const int workers = std::min<int>(worker_cap(), static_cast<int>(ks.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    std::vector<SweepRecord> out;
    for (std::size_t i = 0; i < ks.size(); ++i)
        if (keep[i]) out.push_back(records[i]);
    return out;
}

double fit_exponent(const std::vector<SweepRecord>& records, SweepColumn column) {
    auto pick = [column](const SweepRecord& r) {
        switch (column) {
            case SweepColumn::Nu: return r.nu_fk;
            case SweepColumn::SupNorm: return r.sup_norm_fk;
            case SweepColumn::LipEst: return r.lip_est_fk;
            default: return r.d_tau_to_zero;
        }
    };
    std::vector<SweepRecord> sorted = records;
    std::sort(sorted.begin(), sorted.end(),
              [](const SweepRecord& a, const SweepRecord& b) { return a.k < b.k; });
    const std::size_t half = (sorted.size() + 1) / 2;
    if (sorted.size() < 2 || half < 2)
        throw std::invalid_argument("fit_exponent: need at least 2 records in the tail");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = sorted.size() - half; i < sorted.size(); ++i) {
        const double v = std::abs(pick(sorted[i]));
        if (v <= 0.0) throw NonFiniteValue("fit_exponent: zero column value in the tail");
        const double lx = std::log(static_cast<double>(sorted[i].k));
        const double ly = std::log(v);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

} // namespace sphereval
