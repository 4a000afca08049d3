#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

#include "sphereval/errors.hpp"
#include "sphereval/quadrature.hpp"

namespace sphereval {

constexpr double kTieTol = 1e-12;

struct TieCounter {
    long long ties = 0;
};

/// Analytic bundle for a smooth node: value of f on S^{n-1} and Euclidean
/// gradient / Hessian of the 1-homogeneous extension, evaluated at unit x.
struct SmoothBundle {
    ScalarFn value;
    VectorFn grad;
    std::function<Eigen::MatrixXd(const Eigen::Ref<const Eigen::VectorXd>&)> hess;
};

namespace detail {

class FieldNode {
public:
    virtual ~FieldNode() = default;

    virtual double eval(const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;

    // Euclidean gradient of the 1-homogeneous extension at unit x.
    // Ties at lattice seams: throw TieAtNode when `ties` is null, otherwise
    // count and take the first active child.
    virtual Eigen::VectorXd bar_grad(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     TieCounter* ties) const = 0;

    // Euclidean Hessian of the 1-homogeneous extension at unit x.
    // strict: reject any node that is not globally C^2 (lattice nodes,
    // DiskSupport, GlAct). Non-strict: a.e. Hessian via the active child.
    virtual Eigen::MatrixXd ext_hessian(const Eigen::Ref<const Eigen::VectorXd>& x,
                                        TieCounter* ties, bool strict) const;
};

} // namespace detail

/// Lipschitz function on S^{n-1} as an immutable expression tree. Values are
/// shareable and all operations are pure.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(int ambient_dim, std::shared_ptr<const detail::FieldNode> node)
        : n_(ambient_dim), node_(std::move(node)) {}

    int ambient_dim() const { return n_; }
    bool valid() const { return static_cast<bool>(node_); }
    const detail::FieldNode& node() const { return *node_; }
    std::shared_ptr<const detail::FieldNode> node_ptr() const { return node_; }

private:
    int n_ = 0;
    std::shared_ptr<const detail::FieldNode> node_;
};

// ---- constructors ----

ScalarField constant(int n, double c);
ScalarField linear(const Eigen::VectorXd& v);
/// Support function of lambda*D_xi - xi restricted to the sphere:
/// x -> lambda*|x - <x,xi>xi| - <x,xi>.
ScalarField disk_support(const Eigen::VectorXd& xi, double lambda);
ScalarField scale(double t, const ScalarField& f);
ScalarField sum(const std::vector<ScalarField>& fs);
ScalarField meet(const std::vector<ScalarField>& fs); // pointwise min
ScalarField join(const std::vector<ScalarField>& fs); // pointwise max
ScalarField meet(const ScalarField& f, const ScalarField& h);
ScalarField join(const ScalarField& f, const ScalarField& h);
/// (g.f)(x) = |g^T x| f(g^T x / |g^T x|). Throws SingularMatrix.
ScalarField gl_act(const Eigen::MatrixXd& g, const ScalarField& f);
ScalarField smooth_field(int n, SmoothBundle bundle);

struct Monomial {
    double coef = 0.0;
    std::vector<int> exps; // one exponent per coordinate
};

/// Restriction of a polynomial to the sphere, as a sum of smooth nodes (one
/// per homogeneous component, extended 1-homogeneously).
ScalarField poly_field(int n, const std::vector<Monomial>& terms);

// ---- pointwise operations ----

double eval(const ScalarField& f, const Eigen::Ref<const Eigen::VectorXd>& x);

/// bar_grad f = grad f~ = (spherical grad f) + f(x) x.
Eigen::VectorXd bar_grad(const ScalarField& f, const Eigen::Ref<const Eigen::VectorXd>& x,
                         TieCounter* ties = nullptr);

/// Spherical (tangential) gradient: bar_grad - eval * x.
Eigen::VectorXd sph_grad(const ScalarField& f, const Eigen::Ref<const Eigen::VectorXd>& x,
                         TieCounter* ties = nullptr);

/// P D^2f~ P with P = Id - x x^T; equals (spherical Hessian) + f * Id on the
/// tangent space. Throws NotSmooth unless the tree has only Smooth, Linear,
/// Const, Scale, Sum nodes.
Eigen::MatrixXd sph_hess(const ScalarField& f, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Almost-everywhere variant: lattice nodes defer to the active child,
/// DiskSupport and GlAct use their pointwise Hessians away from seams.
Eigen::MatrixXd sph_hess_ae(const ScalarField& f, const Eigen::Ref<const Eigen::VectorXd>& x,
                            TieCounter* ties = nullptr);

// ---- grid-level operations ----

double sup_norm(const ScalarField& f, const QuadratureGrid& grid);

/// ess-sup of |sph_grad| over grid nodes; tie nodes are skipped and counted.
double lip_est(const ScalarField& f, const QuadratureGrid& grid, TieCounter* ties = nullptr);

/// ||f-h||_inf (grid sup) + L1 distance of spherical gradients.
double d_tau(const ScalarField& f, const ScalarField& h, const QuadratureGrid& grid,
             TieCounter* ties = nullptr);

struct TauTols {
    double sup = 1e-2;
    double grad_l1 = 1e-2;
    double lip_bound = 2.0;
};

struct TauReport {
    double uniform_sup_deviation = 0.0;  // tail (last member) sup deviation
    double gradient_l1_deviation = 0.0;  // tail L1 gradient deviation
    double gradient_linf_bound = 0.0;    // max lip_est over the sequence
    long long ties = 0;
    bool verdict = false;
};

TauReport tau_check(const std::vector<ScalarField>& sequence, const ScalarField& f,
                    const QuadratureGrid& grid, const TauTols& tols = {});

} // namespace sphereval
