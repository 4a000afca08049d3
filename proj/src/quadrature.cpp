#include "sphereval/quadrature.hpp"

#include <array>
#include <numbers>
#include <ostream>
#include <random>

namespace sphereval {

namespace {
constexpr double kPi = std::numbers::pi;
}

double sphere_area(int m) {
    if (m < 1) throw std::invalid_argument("sphere_area: m >= 1 required");
    return 2.0 * std::pow(kPi, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
}

double unit_ball_volume(int m) {
    if (m < 1) throw std::invalid_argument("unit_ball_volume: m >= 1 required");
    return std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Icosphere: return "icosphere";
        case Scheme::ProductGauss: return "product_gauss";
        case Scheme::MonteCarlo: return "mc";
    }
    return "?";
}

void QuadratureGrid::write_csv(std::ostream& os) const {
    os.precision(17);
    os << ambient_dim << ',' << count() << ',' << scheme_name(scheme) << ',' << seed << '\n';
    for (Eigen::Index i = 0; i < count(); ++i) {
        for (int j = 0; j < ambient_dim; ++j) os << nodes(j, i) << ',';
        os << weights(i) << '\n';
    }
}

namespace {

using Tri = std::array<Eigen::Vector3d, 3>;

std::vector<Tri> icosahedron_faces() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> v;
    for (double s1 : {-1.0, 1.0})
        for (double s2 : {-1.0, 1.0}) {
            v.emplace_back(0.0, s1, s2 * phi);
            v.emplace_back(s1, s2 * phi, 0.0);
            v.emplace_back(s1 * phi, 0.0, s2);
        }
    for (auto& p : v) p.normalize();
    // faces by proximity: each vertex pair at the minimal edge length
    const double edge = 2.0 / std::sqrt(phi * phi + 1.0) * 1.0001;
    std::vector<Tri> faces;
    const int V = static_cast<int>(v.size());
    for (int a = 0; a < V; ++a)
        for (int b = a + 1; b < V; ++b)
            for (int c = b + 1; c < V; ++c) {
                if ((v[a] - v[b]).norm() < edge && (v[b] - v[c]).norm() < edge &&
                    (v[a] - v[c]).norm() < edge) {
                    Tri t{v[a], v[b], v[c]};
                    // orient outward
                    if ((t[1] - t[0]).cross(t[2] - t[0]).dot(t[0] + t[1] + t[2]) < 0)
                        std::swap(t[1], t[2]);
                    faces.push_back(t);
                }
            }
    return faces; // 20 faces
}

double solid_angle(const Tri& t) {
    const double num = std::abs(t[0].dot(t[1].cross(t[2])));
    const double den = 1.0 + t[0].dot(t[1]) + t[1].dot(t[2]) + t[0].dot(t[2]);
    return 2.0 * std::atan2(num, den);
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int q, std::vector<double>& x, std::vector<double>& w) {
    x.assign(q, 0.0);
    w.assign(q, 0.0);
    for (int i = 0; i < q; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (q + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= q; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = q * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= q; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = q * (t * p1 - p0) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

} // namespace

QuadratureGrid icosphere_grid(int level) {
    if (level < 0) throw std::invalid_argument("icosphere_grid: level >= 0 required");
    std::vector<Tri> tris = icosahedron_faces();
    for (int l = 0; l < level; ++l) {
        std::vector<Tri> next;
        next.reserve(tris.size() * 4);
        for (const Tri& t : tris) {
            const Eigen::Vector3d m01 = (t[0] + t[1]).normalized();
            const Eigen::Vector3d m12 = (t[1] + t[2]).normalized();
            const Eigen::Vector3d m02 = (t[0] + t[2]).normalized();
            next.push_back({t[0], m01, m02});
            next.push_back({m01, t[1], m12});
            next.push_back({m02, m12, t[2]});
            next.push_back({m01, m12, m02});
        }
        tris = std::move(next);
    }
    QuadratureGrid g;
    g.ambient_dim = 3;
    g.scheme = Scheme::Icosphere;
    const Eigen::Index cnt = static_cast<Eigen::Index>(tris.size());
    g.nodes.resize(3, cnt);
    g.weights.resize(cnt);
    for (Eigen::Index i = 0; i < cnt; ++i) {
        g.nodes.col(i) = (tris[i][0] + tris[i][1] + tris[i][2]).normalized();
        g.weights(i) = solid_angle(tris[i]);
    }
    g.weights *= 4.0 * kPi / g.weights.sum();
    return g;
}

QuadratureGrid product_gauss_grid(int order) {
    if (order < 1) throw std::invalid_argument("product_gauss_grid: order >= 1 required");
    std::vector<double> gx, gw;
    gauss_legendre(order, gx, gw);
    const int naz = 2 * order;
    QuadratureGrid g;
    g.ambient_dim = 3;
    g.scheme = Scheme::ProductGauss;
    g.nodes.resize(3, static_cast<Eigen::Index>(order) * naz);
    g.weights.resize(g.nodes.cols());
    Eigen::Index idx = 0;
    for (int i = 0; i < order; ++i) {
        const double ct = gx[i];
        const double st = std::sqrt(1.0 - ct * ct);
        for (int j = 0; j < naz; ++j) {
            const double ph = 2.0 * kPi * j / naz;
            g.nodes.col(idx) << st * std::cos(ph), st * std::sin(ph), ct;
            g.weights(idx) = gw[i] * (2.0 * kPi / naz);
            ++idx;
        }
    }
    return g;
}

QuadratureGrid monte_carlo_grid(int n, long count, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("monte_carlo_grid: n >= 2 required");
    if (count < 1) throw std::invalid_argument("monte_carlo_grid: count >= 1 required");
    QuadratureGrid g;
    g.ambient_dim = n;
    g.scheme = Scheme::MonteCarlo;
    g.seed = seed;
    g.nodes.resize(n, count);
    g.weights = Eigen::VectorXd::Constant(count, sphere_area(n - 1) / static_cast<double>(count));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (long i = 0; i < count; ++i) {
        do {
            for (int j = 0; j < n; ++j) v(j) = gauss(rng);
        } while (v.norm() < 1e-8);
        g.nodes.col(i) = v / v.norm();
    }
    return g;
}

QuadratureGrid build_grid(int n, long resolution, Scheme scheme, std::uint64_t seed) {
    switch (scheme) {
        case Scheme::Icosphere:
            if (n != 3) throw UnsupportedScheme("icosphere grids exist only for n=3");
            return icosphere_grid(static_cast<int>(resolution));
        case Scheme::ProductGauss:
            if (n != 3) throw UnsupportedScheme("product-gauss grids exist only for n=3");
            return product_gauss_grid(static_cast<int>(resolution));
        case Scheme::MonteCarlo:
            return monte_carlo_grid(n, resolution, seed);
    }
    throw UnsupportedScheme("unknown scheme");
}

namespace {

template <typename T, typename Fn>
T integrate_impl(const QuadratureGrid& grid, const Fn& g) {
    const Eigen::Index cnt = grid.count();
    std::vector<T> vals(static_cast<std::size_t>(cnt));
    for (Eigen::Index i = 0; i < cnt; ++i) {
        T v = g(grid.nodes.col(i));
        if constexpr (std::is_same_v<T, double>) {
            if (!std::isfinite(v)) throw NonFiniteValue("integrate: non-finite integrand value");
        } else {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NonFiniteValue("integrate: non-finite integrand value");
        }
        vals[static_cast<std::size_t>(i)] = grid.weights(i) * v;
    }
    return detail::pairwise_sum(vals, 0, vals.size());
}

} // namespace

double integrate(const QuadratureGrid& grid, const ScalarFn& g) {
    return integrate_impl<double>(grid, g);
}

std::complex<double> integrate_c(const QuadratureGrid& grid, const ComplexFn& g) {
    return integrate_impl<std::complex<double>>(grid, g);
}

Eigen::VectorXd integrate_vec(const QuadratureGrid& grid, const VectorFn& g) {
    const Eigen::Index cnt = grid.count();
    std::vector<Eigen::VectorXd> vals(static_cast<std::size_t>(cnt));
    for (Eigen::Index i = 0; i < cnt; ++i) {
        Eigen::VectorXd v = g(grid.nodes.col(i));
        if (!v.allFinite()) throw NonFiniteValue("integrate_vec: non-finite integrand value");
        vals[static_cast<std::size_t>(i)] = grid.weights(i) * v;
    }
    return detail::pairwise_sum(vals, 0, vals.size());
}

Eigen::VectorXcd integrate_vec_c(const QuadratureGrid& grid, const CVectorFn& g) {
    const Eigen::Index cnt = grid.count();
    std::vector<Eigen::VectorXcd> vals(static_cast<std::size_t>(cnt));
    for (Eigen::Index i = 0; i < cnt; ++i) {
        Eigen::VectorXcd v = g(grid.nodes.col(i));
        if (!v.allFinite()) throw NonFiniteValue("integrate_vec_c: non-finite integrand value");
        vals[static_cast<std::size_t>(i)] = grid.weights(i) * v;
    }
    return detail::pairwise_sum(vals, 0, vals.size());
}

} // namespace sphereval
