#pragma once

#include <Eigen/Dense>

#include <vector>

#include "sphereval/fields.hpp"
#include "sphereval/quadrature.hpp"

namespace sphereval {

struct SweepConfig {
    int n = 4;
    double delta = 0.0; // <= 0 means find_delta(n)
    double p = 7.0 / 6.0;
    std::vector<long> k_values; // empty means powers of 2 in [32, 1024]
    const QuadratureGrid* grid = nullptr; // norm estimates; required for sweep
};

struct SweepRecord {
    long k = 0;
    long packing_size = 0;
    double nu_fk = 0.0;       // signed, convention nu(psi) = -mu(C)
    double sup_norm_fk = 0.0; // grid estimate refined at the packing centers
    double lip_est_fk = 0.0;
    double d_tau_to_zero = 0.0;
    long long tie_count = 0;
};

/// Exact integral of x1^3 against the area measure of C_{xi,lambda}:
/// omega_{n-1} lambda^{n-1}/(1+lambda^2) [3 xi1 (1-xi1^2)/(n-1) - xi1^3].
double mu_cone(const Eigen::VectorXd& xi, double lambda, int n);

struct EstimateReport {
    double worst_margin = 0.0; // max of mu_cone - bound; pass iff <= 0
    long violations = 0;
    bool pass = false;
};

/// Checks mu_cone(xi, lambda, n) <= -(omega_{n-1}/2) lambda^{n-3} over the
/// sample set. All xi must have first coordinate >= delta, lambdas >= 2.
EstimateReport verify_estimate(double delta, const std::vector<double>& lambda_samples,
                               const std::vector<Eigen::VectorXd>& xi_samples, int n);

/// Smallest t in (1/2, 1) with 3t(1-t^2)/(n-1) - t^3 = -5/8, rounded up to
/// 1e-3. Throws NoRoot if the equation has no solution in the interval.
double find_delta(int n);

/// Cube grid of side r/sqrt(n) (r = sqrt(1-delta^2)) with spacing eps in the
/// equatorial projection, lifted to the cap {x1 >= delta}. Pairwise chordal
/// distances >= eps. Throws EmptyPacking when the cube holds no point.
std::vector<Eigen::VectorXd> cap_packing(double delta, double eps, int n);

/// f_k = k^{-p} min(0, min_i phi_{xi_i, k}) as a generic lattice tree.
ScalarField f_k_field(long k, const std::vector<Eigen::VectorXd>& points, double p);

/// Same function with O(1) evaluation: the packing spacing 4/sqrt(1+k^2)
/// exceeds twice the support radius sqrt(2)/sqrt(1+k^2), so rounding the
/// equatorial projection to the grid yields the only possible active cap.
ScalarField f_k_field_packed(long k, double delta, double p);

/// k^{-p(n-1)} sum_i (-mu_cone(xi_i, k, n)).
double nu_fk(long k, const std::vector<Eigen::VectorXd>& points, double p, int n);

std::vector<SweepRecord> sweep(const SweepConfig& cfg);

enum class SweepColumn { Nu, SupNorm, LipEst, DTau };

/// Least-squares slope of log|column| vs log k over the largest 50% of k.
double fit_exponent(const std::vector<SweepRecord>& records, SweepColumn column);

} // namespace sphereval
