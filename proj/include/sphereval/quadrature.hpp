#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "sphereval/errors.hpp"

namespace sphereval {

/// sigma_m = H^m(S^m), the surface area of the unit m-sphere.
double sphere_area(int m);

/// omega_m, the Lebesgue volume of the unit m-ball.
double unit_ball_volume(int m);

enum class Scheme { Icosphere, ProductGauss, MonteCarlo };

const char* scheme_name(Scheme s);

/// Nodes and positive weights approximating H^{n-1} on S^{n-1}.
/// Nodes are stored as unit columns; weights carry measure units and sum
/// to sigma_{n-1}.
struct QuadratureGrid {
    int ambient_dim = 3;
    Eigen::MatrixXd nodes;   // n x count
    Eigen::VectorXd weights; // count
    Scheme scheme = Scheme::Icosphere;
    std::uint64_t seed = 0;

    Eigen::Index count() const { return weights.size(); }

    // header `n,count,scheme,seed`, then rows `x1,...,xn,w` at 17 digits
    void write_csv(std::ostream& os) const;
};

/// Icosphere at the given subdivision level: nodes are normalized triangle
/// centroids, weights the spherical triangle areas rescaled to total 4*pi.
QuadratureGrid icosphere_grid(int level);

/// Product Gauss-Legendre (polar) x trapezoid (azimuth) grid on S^2 with
/// `order` polar nodes. Integrates spherical polynomials up to degree
/// ~2*order-1 exactly.
QuadratureGrid product_gauss_grid(int order);

/// i.i.d. uniform nodes on S^{n-1} with equal weights sigma_{n-1}/count.
QuadratureGrid monte_carlo_grid(int n, long count, std::uint64_t seed);

/// Dispatcher; throws UnsupportedScheme for (scheme, n) pairs that are not
/// implemented. `resolution` is the subdivision level (Icosphere), the
/// polar order (ProductGauss) or the sample count (MonteCarlo).
QuadratureGrid build_grid(int n, long resolution, Scheme scheme, std::uint64_t seed = 0);

using ScalarFn = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;
using ComplexFn = std::function<std::complex<double>(const Eigen::Ref<const Eigen::VectorXd>&)>;
using VectorFn = std::function<Eigen::VectorXd(const Eigen::Ref<const Eigen::VectorXd>&)>;
using CVectorFn = std::function<Eigen::VectorXcd(const Eigen::Ref<const Eigen::VectorXd>&)>;

namespace detail {

/// Deterministic pairwise reduction, independent of any partitioning.
template <typename T>
T pairwise_sum(std::vector<T>& buf, std::size_t lo, std::size_t hi) {
    const std::size_t len = hi - lo;
    if (len == 0) return T{};
    if (len <= 8) {
        T acc = buf[lo];
        for (std::size_t i = lo + 1; i < hi; ++i) acc += buf[i];
        return acc;
    }
    const std::size_t mid = lo + len / 2;
    return pairwise_sum(buf, lo, mid) + pairwise_sum(buf, mid, hi);
}

} // namespace detail

/// Sum of w_i * g(x_i) by deterministic pairwise reduction.
/// Throws NonFiniteValue if g returns NaN or infinity at a node.
double integrate(const QuadratureGrid& grid, const ScalarFn& g);
std::complex<double> integrate_c(const QuadratureGrid& grid, const ComplexFn& g);

Eigen::VectorXd integrate_vec(const QuadratureGrid& grid, const VectorFn& g);
Eigen::VectorXcd integrate_vec_c(const QuadratureGrid& grid, const CVectorFn& g);

} // namespace sphereval
