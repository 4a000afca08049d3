#pragma once

#include <Eigen/Dense>

#include <complex>
#include <variant>
#include <vector>

#include "sphereval/bodies.hpp"
#include "sphereval/fields.hpp"
#include "sphereval/quadrature.hpp"

namespace sphereval {

/// Smooth density on the sphere together with its derivative data, packaged
/// as a field tree so sph_grad / sph_hess are available.
using ScalarDensity = ScalarField;

/// Smooth map x -> complex symmetric n x n matrix.
struct MatrixDensity {
    int ambient_dim = 3;
    bool odd = false; // parity flag: Phi(-x) = -Phi(x)
    std::function<Eigen::MatrixXcd(const Eigen::Ref<const Eigen::VectorXd>&)> value;
};

struct Theta1 {
    ScalarDensity phi;
};
struct Theta2 {
    MatrixDensity phi;
};
struct RotInv {
    std::complex<double> c0, c1, c2;
};
struct AreaIntegral {
    ScalarFn p; // defaults to x1^3 at the CLI level
};
struct HessS2 {
    ScalarDensity psi; // n = 3 only
};

struct Valuation {
    std::variant<Theta1, Theta2, RotInv, AreaIntegral, HessS2> form;
    int degree = 0; // declared homogeneity degree in f
};

Valuation make_theta1(ScalarDensity phi);
Valuation make_theta2(MatrixDensity phi);
Valuation make_rotinv(std::complex<double> c0, std::complex<double> c1, std::complex<double> c2);
Valuation make_area_integral(ScalarFn p);
Valuation make_hess_s2(ScalarDensity psi);

// ---- evaluation ----

std::complex<double> theta1_eval(const ScalarDensity& phi, const ScalarField& f,
                                 const QuadratureGrid& grid);

/// integral of <Phi(x) bar_grad f, bar_grad f>; tie nodes use the a.e.
/// gradient (first active child) and are counted.
std::complex<double> theta2_eval(const MatrixDensity& phi, const ScalarField& f,
                                 const QuadratureGrid& grid, TieCounter* ties = nullptr);

/// c0 + c1 int f + c2 int [(n-1) f^2 - |grad_S f|^2].
std::complex<double> rotinv_eval(std::complex<double> c0, std::complex<double> c1,
                                 std::complex<double> c2, const ScalarField& f,
                                 const QuadratureGrid& grid, TieCounter* ties = nullptr);

std::complex<double> area_valuation_eval(const ScalarFn& p, const ConvexBody& k);

/// 2 int psi S_2(tangent block of sph_hess f); n=3, so S_2 is the det of the
/// 2x2 block. f must be smooth in the a.e. sense at every grid node.
std::complex<double> hess_s2_eval(const ScalarDensity& psi, const ScalarField& f,
                                  const QuadratureGrid& grid, TieCounter* ties = nullptr);

/// Dispatcher over the tagged union. AreaIntegral forms reject fields.
std::complex<double> valuation_eval(const Valuation& mu, const ScalarField& f,
                                    const QuadratureGrid& grid);

// ---- densities ----

/// Phi(x) = (n-1) x x^T - (Id - x x^T); Theta2 integrand (n-1) f^2 - |grad f|^2.
MatrixDensity even_density(int n);

/// Odd matrix density built from psi's spherical Hessian so that
/// theta2_eval(odd_density(psi), f) = hess_s2_eval(psi, f). n = 3.
MatrixDensity odd_density(const ScalarDensity& psi);

// ---- checkers ----

struct CheckReport {
    double residual = 0.0;
    double scale = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// |mu(f v h) + mu(f ^ h) - mu(f) - mu(h)| vs tol * scale.
CheckReport check_valuation_property(const Valuation& mu, const ScalarField& f,
                                     const ScalarField& h, const QuadratureGrid& grid, double tol);

/// |mu(f + <v,.>) - mu(f)| vs tol * scale.
CheckReport check_dual_invariance(const Valuation& mu, const ScalarField& f,
                                  const Eigen::VectorXd& v, const QuadratureGrid& grid, double tol);

/// max over test fields of |int Phi(x) bar_grad f dH|.
double theta2_condition_residual(const MatrixDensity& phi, const QuadratureGrid& grid,
                                 const std::vector<ScalarField>& test_fields);

/// Residuals -Div_S(phi_j - <phi_j,x>x) + <phi_j,x> per column j, spherical
/// divergence by central differences in a tangent frame.
Eigen::VectorXd pde_residual(const MatrixDensity& phi, const Eigen::Ref<const Eigen::VectorXd>& x,
                             double fd_step = 1e-4);

struct DegreeFit {
    Eigen::VectorXcd coefficients; // c0 + c1 t + ... full-degree LS fit
    double truncation_residual = 0.0; // of the degree-2 truncation, absolute
    double scale = 0.0;
};

/// Least-squares polynomial fit of t -> mu(t f) over the samples.
DegreeFit fit_degree(const Valuation& mu, const ScalarField& f,
                     const std::vector<double>& t_samples, const QuadratureGrid& grid);

} // namespace sphereval
