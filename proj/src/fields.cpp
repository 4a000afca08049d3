#include "sphereval/fields.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sphereval {

using detail::FieldNode;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using RefVec = Eigen::Ref<const Eigen::VectorXd>;

namespace detail {

MatrixXd FieldNode::ext_hessian(const RefVec&, TieCounter*, bool) const {
    throw NotSmooth("field has no second derivatives at this node kind");
}

} // namespace detail

namespace {

class ConstNode final : public FieldNode {
public:
    explicit ConstNode(double c) : c_(c) {}
    double eval(const RefVec&) const override { return c_; }
    VectorXd bar_grad(const RefVec& x, TieCounter*) const override { return c_ * x; }
    MatrixXd ext_hessian(const RefVec& x, TieCounter*, bool) const override {
        const auto n = x.size();
        return c_ * (MatrixXd::Identity(n, n) - x * x.transpose());
    }

private:
    double c_;
};

class LinearNode final : public FieldNode {
public:
    explicit LinearNode(VectorXd v) : v_(std::move(v)) {}
    double eval(const RefVec& x) const override { return v_.dot(x); }
    VectorXd bar_grad(const RefVec&, TieCounter*) const override { return v_; }
    MatrixXd ext_hessian(const RefVec& x, TieCounter*, bool) const override {
        return MatrixXd::Zero(x.size(), x.size());
    }

private:
    VectorXd v_;
};

class DiskSupportNode final : public FieldNode {
public:
    DiskSupportNode(VectorXd xi, double lambda) : xi_(std::move(xi)), lambda_(lambda) {}

    double eval(const RefVec& x) const override {
        const double t = xi_.dot(x);
        return lambda_ * (x - t * xi_).norm() - t;
    }

    VectorXd bar_grad(const RefVec& x, TieCounter* ties) const override {
        const double t = xi_.dot(x);
        const VectorXd perp = x - t * xi_;
        const double r = perp.norm();
        if (r < kTieTol) {
            if (!ties) throw TieAtNode("disk support gradient undefined at +/-xi");
            ++ties->ties;
            return -xi_; // value of the limit along any tangent ray; a.e. irrelevant
        }
        return lambda_ / r * perp - xi_;
    }

    MatrixXd ext_hessian(const RefVec& x, TieCounter* ties, bool strict) const override {
        if (strict) throw NotSmooth("disk support is not C^2 at +/-xi");
        const double t = xi_.dot(x);
        const VectorXd perp = x - t * xi_;
        const double r = perp.norm();
        if (r < kTieTol) {
            if (!ties) throw TieAtNode("disk support Hessian undefined at +/-xi");
            ++ties->ties;
            return MatrixXd::Zero(x.size(), x.size());
        }
        const auto n = x.size();
        const MatrixXd p = MatrixXd::Identity(n, n) - xi_ * xi_.transpose();
        const VectorXd u = perp / r;
        return lambda_ / r * (p - u * u.transpose());
    }

private:
    VectorXd xi_;
    double lambda_;
};

class ScaleNode final : public FieldNode {
public:
    ScaleNode(double t, std::shared_ptr<const FieldNode> child)
        : t_(t), child_(std::move(child)) {}
    double eval(const RefVec& x) const override { return t_ * child_->eval(x); }
    VectorXd bar_grad(const RefVec& x, TieCounter* ties) const override {
        return t_ * child_->bar_grad(x, ties);
    }
    MatrixXd ext_hessian(const RefVec& x, TieCounter* ties, bool strict) const override {
        return t_ * child_->ext_hessian(x, ties, strict);
    }

private:
    double t_;
    std::shared_ptr<const FieldNode> child_;
};

class SumNode final : public FieldNode {
public:
    explicit SumNode(std::vector<std::shared_ptr<const FieldNode>> children)
        : children_(std::move(children)) {}
    double eval(const RefVec& x) const override {
        double acc = 0.0;
        for (const auto& c : children_) acc += c->eval(x);
        return acc;
    }
    VectorXd bar_grad(const RefVec& x, TieCounter* ties) const override {
        VectorXd acc = VectorXd::Zero(x.size());
        for (const auto& c : children_) acc += c->bar_grad(x, ties);
        return acc;
    }
    MatrixXd ext_hessian(const RefVec& x, TieCounter* ties, bool strict) const override {
        MatrixXd acc = MatrixXd::Zero(x.size(), x.size());
        for (const auto& c : children_) acc += c->ext_hessian(x, ties, strict);
        return acc;
    }

private:
    std::vector<std::shared_ptr<const FieldNode>> children_;
};

class LatticeNode final : public FieldNode {
public:
    LatticeNode(bool is_min, std::vector<std::shared_ptr<const FieldNode>> children)
        : is_min_(is_min), children_(std::move(children)) {}

    double eval(const RefVec& x) const override {
        double best = children_[0]->eval(x);
        for (std::size_t i = 1; i < children_.size(); ++i) {
            const double v = children_[i]->eval(x);
            best = is_min_ ? std::min(best, v) : std::max(best, v);
        }
        return best;
    }

    VectorXd bar_grad(const RefVec& x, TieCounter* ties) const override {
        return active(x, ties)->bar_grad(x, ties);
    }

    MatrixXd ext_hessian(const RefVec& x, TieCounter* ties, bool strict) const override {
        if (strict) throw NotSmooth("Hessians are undefined across min/max seams");
        return active(x, ties)->ext_hessian(x, ties, strict);
    }

private:
    // first active child; ties within kTieTol counted (or rejected)
    const FieldNode* active(const RefVec& x, TieCounter* ties) const {
        const double best = eval(x);
        const FieldNode* first = nullptr;
        int hits = 0;
        for (const auto& c : children_) {
            if (std::abs(c->eval(x) - best) <= kTieTol) {
                if (!first) first = c.get();
                ++hits;
            }
        }
        if (hits > 1) {
            if (!ties) throw TieAtNode("min/max tie at node");
            ++ties->ties;
        }
        return first;
    }

    bool is_min_;
    std::vector<std::shared_ptr<const FieldNode>> children_;
};

class GlActNode final : public FieldNode {
public:
    GlActNode(MatrixXd g, std::shared_ptr<const FieldNode> child)
        : g_(std::move(g)), gt_(g_.transpose()), child_(std::move(child)) {}

    double eval(const RefVec& x) const override {
        const VectorXd u = gt_ * x;
        const double r = u.norm();
        return r * child_->eval(u / r);
    }

    VectorXd bar_grad(const RefVec& x, TieCounter* ties) const override {
        const VectorXd u = gt_ * x;
        return g_ * child_->bar_grad(u / u.norm(), ties);
    }

    MatrixXd ext_hessian(const RefVec& x, TieCounter* ties, bool strict) const override {
        if (strict) throw NotSmooth("Hessian across GL action not part of the strict path");
        const VectorXd u = gt_ * x;
        const double r = u.norm();
        // D^2 f~ is (-1)-homogeneous
        return g_ * child_->ext_hessian(u / r, ties, strict) * gt_ / r;
    }

private:
    MatrixXd g_, gt_;
    std::shared_ptr<const FieldNode> child_;
};

class SmoothNode final : public FieldNode {
public:
    explicit SmoothNode(SmoothBundle b) : b_(std::move(b)) {}
    double eval(const RefVec& x) const override { return b_.value(x); }
    VectorXd bar_grad(const RefVec& x, TieCounter*) const override { return b_.grad(x); }
    MatrixXd ext_hessian(const RefVec& x, TieCounter*, bool) const override {
        return b_.hess(x);
    }

private:
    SmoothBundle b_;
};

void check_same_dim(const std::vector<ScalarField>& fs) {
    if (fs.empty()) throw DimensionMismatch("empty field list");
    for (const auto& f : fs)
        if (!f.valid() || f.ambient_dim() != fs.front().ambient_dim())
            throw DimensionMismatch("fields have mismatched ambient dimensions");
}

std::vector<std::shared_ptr<const FieldNode>> node_ptrs(const std::vector<ScalarField>& fs) {
    std::vector<std::shared_ptr<const FieldNode>> out;
    out.reserve(fs.size());
    for (const auto& f : fs) out.push_back(f.node_ptr());
    return out;
}

} // namespace

ScalarField constant(int n, double c) {
    return {n, std::make_shared<ConstNode>(c)};
}

ScalarField linear(const VectorXd& v) {
    return {static_cast<int>(v.size()), std::make_shared<LinearNode>(v)};
}

ScalarField disk_support(const VectorXd& xi, double lambda) {
    if (std::abs(xi.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("disk_support: xi must be a unit vector");
    if (lambda < 1.0) throw std::invalid_argument("disk_support: lambda >= 1 required");
    return {static_cast<int>(xi.size()), std::make_shared<DiskSupportNode>(xi, lambda)};
}

ScalarField scale(double t, const ScalarField& f) {
    return {f.ambient_dim(), std::make_shared<ScaleNode>(t, f.node_ptr())};
}

ScalarField sum(const std::vector<ScalarField>& fs) {
    check_same_dim(fs);
    return {fs.front().ambient_dim(), std::make_shared<SumNode>(node_ptrs(fs))};
}

ScalarField meet(const std::vector<ScalarField>& fs) {
    check_same_dim(fs);
    return {fs.front().ambient_dim(), std::make_shared<LatticeNode>(true, node_ptrs(fs))};
}

ScalarField join(const std::vector<ScalarField>& fs) {
    check_same_dim(fs);
    return {fs.front().ambient_dim(), std::make_shared<LatticeNode>(false, node_ptrs(fs))};
}

ScalarField meet(const ScalarField& f, const ScalarField& h) {
    return meet(std::vector<ScalarField>{f, h});
}

ScalarField join(const ScalarField& f, const ScalarField& h) {
    return join(std::vector<ScalarField>{f, h});
}

ScalarField gl_act(const MatrixXd& g, const ScalarField& f) {
    if (g.rows() != g.cols() || g.rows() != f.ambient_dim())
        throw DimensionMismatch("gl_act: matrix shape does not match field dimension");
    if (std::abs(g.determinant()) < 1e-14)
        throw SingularMatrix("gl_act: matrix is singular");
    return {f.ambient_dim(), std::make_shared<GlActNode>(g, f.node_ptr())};
}

ScalarField smooth_field(int n, SmoothBundle bundle) {
    return {n, std::make_shared<SmoothNode>(std::move(bundle))};
}

namespace {

struct HomPoly {
    int degree = 0;
    std::vector<Monomial> terms;

    double value(const RefVec& x) const {
        double acc = 0.0;
        for (const auto& t : terms) {
            double m = t.coef;
            for (int j = 0; j < static_cast<int>(t.exps.size()); ++j)
                for (int e = 0; e < t.exps[j]; ++e) m *= x(j);
            acc += m;
        }
        return acc;
    }

    VectorXd gradient(const RefVec& x) const {
        VectorXd g = VectorXd::Zero(x.size());
        for (const auto& t : terms)
            for (int j = 0; j < static_cast<int>(t.exps.size()); ++j) {
                if (t.exps[j] == 0) continue;
                double m = t.coef * t.exps[j];
                for (int l = 0; l < static_cast<int>(t.exps.size()); ++l) {
                    const int e = t.exps[l] - (l == j ? 1 : 0);
                    for (int r = 0; r < e; ++r) m *= x(l);
                }
                g(j) += m;
            }
        return g;
    }

    MatrixXd hessian(const RefVec& x) const {
        const auto n = x.size();
        MatrixXd h = MatrixXd::Zero(n, n);
        for (const auto& t : terms)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    const int cj = t.exps[j];
                    const int ck = t.exps[k];
                    double m = t.coef;
                    if (j == k) {
                        if (cj < 2) continue;
                        m *= cj * (cj - 1);
                    } else {
                        if (cj < 1 || ck < 1) continue;
                        m *= cj * ck;
                    }
                    for (int l = 0; l < n; ++l) {
                        int e = t.exps[l];
                        if (l == j) e -= (j == k ? 2 : 1);
                        if (l == k && j != k) e -= 1;
                        for (int r = 0; r < e; ++r) m *= x(l);
                    }
                    h(j, k) += m;
                }
        return h;
    }
};

// Smooth bundle for f = q|_S with q homogeneous of degree d, extended as
// f~(y) = |y|^(1-d) q(y); derivatives evaluated at |x| = 1.
SmoothBundle homogeneous_bundle(int n, HomPoly q) {
    const double a = 1.0 - q.degree;
    auto qp = std::make_shared<HomPoly>(std::move(q));
    SmoothBundle b;
    b.value = [qp](const RefVec& x) { return qp->value(x); };
    b.grad = [qp, a](const RefVec& x) -> VectorXd {
        return a * qp->value(x) * x + qp->gradient(x);
    };
    b.hess = [qp, a, n](const RefVec& x) -> MatrixXd {
        const double v = qp->value(x);
        const VectorXd g = qp->gradient(x);
        MatrixXd h = a * (a - 2.0) * v * x * x.transpose();
        h += a * (x * g.transpose() + g * x.transpose());
        h += a * v * MatrixXd::Identity(n, n);
        h += qp->hessian(x);
        return h;
    };
    return b;
}

} // namespace

ScalarField poly_field(int n, const std::vector<Monomial>& terms) {
    std::map<int, HomPoly> by_degree;
    for (const auto& t : terms) {
        if (static_cast<int>(t.exps.size()) != n)
            throw DimensionMismatch("poly_field: exponent vector length != n");
        int d = 0;
        for (int e : t.exps) d += e;
        auto& hp = by_degree[d];
        hp.degree = d;
        hp.terms.push_back(t);
    }
    if (by_degree.empty()) return constant(n, 0.0);
    std::vector<ScalarField> parts;
    for (auto& [d, hp] : by_degree) {
        if (d == 0) {
            parts.push_back(constant(n, hp.terms.front().coef));
        } else {
            parts.push_back(smooth_field(n, homogeneous_bundle(n, std::move(hp))));
        }
    }
    return parts.size() == 1 ? parts.front() : sum(parts);
}

double eval(const ScalarField& f, const RefVec& x) {
    return f.node().eval(x);
}

VectorXd bar_grad(const ScalarField& f, const RefVec& x, TieCounter* ties) {
    return f.node().bar_grad(x, ties);
}

VectorXd sph_grad(const ScalarField& f, const RefVec& x, TieCounter* ties) {
    return f.node().bar_grad(x, ties) - f.node().eval(x) * x;
}

namespace {

MatrixXd project_hess(const MatrixXd& h, const RefVec& x) {
    const auto n = x.size();
    const MatrixXd p = MatrixXd::Identity(n, n) - x * x.transpose();
    return p * h * p;
}

} // namespace

MatrixXd sph_hess(const ScalarField& f, const RefVec& x) {
    return project_hess(f.node().ext_hessian(x, nullptr, /*strict=*/true), x);
}

MatrixXd sph_hess_ae(const ScalarField& f, const RefVec& x, TieCounter* ties) {
    return project_hess(f.node().ext_hessian(x, ties, /*strict=*/false), x);
}

double sup_norm(const ScalarField& f, const QuadratureGrid& grid) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < grid.count(); ++i)
        m = std::max(m, std::abs(eval(f, grid.nodes.col(i))));
    return m;
}

double lip_est(const ScalarField& f, const QuadratureGrid& grid, TieCounter* ties) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < grid.count(); ++i) {
        TieCounter local;
        const VectorXd g = sph_grad(f, grid.nodes.col(i), &local);
        if (local.ties > 0) {
            if (ties) ties->ties += local.ties;
            continue;
        }
        m = std::max(m, g.norm());
    }
    return m;
}

double d_tau(const ScalarField& f, const ScalarField& h, const QuadratureGrid& grid,
             TieCounter* ties) {
    double sup = 0.0;
    const Eigen::Index cnt = grid.count();
    std::vector<double> vals(static_cast<std::size_t>(cnt), 0.0);
    for (Eigen::Index i = 0; i < cnt; ++i) {
        const auto x = grid.nodes.col(i);
        sup = std::max(sup, std::abs(eval(f, x) - eval(h, x)));
        TieCounter local;
        const VectorXd gf = sph_grad(f, x, &local);
        const VectorXd gh = sph_grad(h, x, &local);
        if (local.ties > 0) {
            if (ties) ties->ties += local.ties;
            continue; // skipped, weight contributes nothing
        }
        vals[static_cast<std::size_t>(i)] = grid.weights(i) * (gf - gh).norm();
    }
    return sup + detail::pairwise_sum(vals, 0, vals.size());
}

TauReport tau_check(const std::vector<ScalarField>& sequence, const ScalarField& f,
                    const QuadratureGrid& grid, const TauTols& tols) {
    if (sequence.empty()) throw std::invalid_argument("tau_check: empty sequence");
    TauReport rep;
    TieCounter ties;
    for (const auto& fj : sequence)
        rep.gradient_linf_bound = std::max(rep.gradient_linf_bound, lip_est(fj, grid, &ties));
    const ScalarField& tail = sequence.back();
    const double d = d_tau(tail, f, grid, &ties);
    double sup = 0.0;
    for (Eigen::Index i = 0; i < grid.count(); ++i)
        sup = std::max(sup, std::abs(eval(tail, grid.nodes.col(i)) - eval(f, grid.nodes.col(i))));
    rep.uniform_sup_deviation = sup;
    rep.gradient_l1_deviation = d - sup;
    rep.ties = ties.ties;
    rep.verdict = rep.uniform_sup_deviation <= tols.sup &&
                  rep.gradient_l1_deviation <= tols.grad_l1 &&
                  rep.gradient_linf_bound <= tols.lip_bound;
    return rep;
}

} // namespace sphereval
