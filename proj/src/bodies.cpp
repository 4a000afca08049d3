#include "sphereval/bodies.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>

namespace sphereval {

using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

int body_dim(const ConvexBody& k) {
    return std::visit(
        [](const auto& b) -> int {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Polytope>) {
                if (b.vertices.empty()) throw std::invalid_argument("polytope without vertices");
                return static_cast<int>(b.vertices.front().size());
            } else if constexpr (std::is_same_v<T, Ball>) {
                return 3;
            } else {
                return static_cast<int>(b.xi.size());
            }
        },
        k);
}

ScalarField support_field(const ConvexBody& k) {
    return std::visit(
        [](const auto& b) -> ScalarField {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Polytope>) {
                std::vector<ScalarField> planes;
                planes.reserve(b.vertices.size());
                for (const auto& v : b.vertices) planes.push_back(linear(v));
                return planes.size() == 1 ? planes.front() : join(planes);
            } else if constexpr (std::is_same_v<T, Ball>) {
                return constant(3, b.radius);
            } else if constexpr (std::is_same_v<T, Disk>) {
                return disk_support(b.xi, b.lambda);
            } else {
                const int n = static_cast<int>(b.xi.size());
                return join(constant(n, 0.0), disk_support(b.xi, b.lambda));
            }
        },
        k);
}

// ---------------------------------------------------------------------------
// 3d convex hull (incremental) and facet atoms
// ---------------------------------------------------------------------------

namespace {

struct Face {
    int a, b, c;
    Vector3d normal; // unit, outward
    double offset;   // <normal, vertex>
};

Face make_face(const std::vector<Vector3d>& pts, int a, int b, int c, const Vector3d& inside) {
    Face f{a, b, c, Vector3d::Zero(), 0.0};
    Vector3d n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    if (n.dot(pts[a] - inside) < 0) {
        std::swap(f.b, f.c);
        n = -n;
    }
    f.normal = n.normalized();
    f.offset = f.normal.dot(pts[f.a]);
    return f;
}

// hull facets as triangles; input must have affine rank 3
std::vector<Face> hull3d(const std::vector<Vector3d>& pts, double eps) {
    const int m = static_cast<int>(pts.size());
    // extreme initial tetrahedron
    int i0 = 0, i1 = 1;
    double best = -1;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const double d = (pts[i] - pts[j]).squaredNorm();
            if (d > best) {
                best = d;
                i0 = i;
                i1 = j;
            }
        }
    int i2 = -1;
    best = -1;
    const Vector3d dir = (pts[i1] - pts[i0]).normalized();
    for (int i = 0; i < m; ++i) {
        const Vector3d w = pts[i] - pts[i0];
        const double d = (w - w.dot(dir) * dir).squaredNorm();
        if (d > best) {
            best = d;
            i2 = i;
        }
    }
    if (best < eps * eps) throw HullFailure("hull3d: input is collinear");
    int i3 = -1;
    best = -1;
    const Vector3d pn = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
    for (int i = 0; i < m; ++i) {
        const double d = std::abs(pn.dot(pts[i] - pts[i0]));
        if (d > best) {
            best = d;
            i3 = i;
        }
    }
    if (best < eps) throw HullFailure("hull3d: input is coplanar");

    const Vector3d inside = 0.25 * (pts[i0] + pts[i1] + pts[i2] + pts[i3]);
    std::vector<Face> faces = {
        make_face(pts, i0, i1, i2, inside), make_face(pts, i0, i1, i3, inside),
        make_face(pts, i0, i2, i3, inside), make_face(pts, i1, i2, i3, inside)};

    for (int p = 0; p < m; ++p) {
        if (p == i0 || p == i1 || p == i2 || p == i3) continue;
        std::vector<int> visible;
        for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi)
            if (faces[fi].normal.dot(pts[p]) - faces[fi].offset > eps) visible.push_back(fi);
        if (visible.empty()) continue;

        std::set<std::pair<int, int>> edges;
        for (int fi : visible) {
            const Face& f = faces[fi];
            for (auto [u, v] : std::array<std::pair<int, int>, 3>{
                     std::pair{f.a, f.b}, std::pair{f.b, f.c}, std::pair{f.c, f.a}}) {
                if (edges.count({v, u}))
                    edges.erase({v, u});
                else
                    edges.insert({u, v});
            }
        }
        std::vector<Face> next;
        std::set<int> vis(visible.begin(), visible.end());
        for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi)
            if (!vis.count(fi)) next.push_back(faces[fi]);
        for (auto [u, v] : edges) next.push_back(make_face(pts, u, v, p, inside));
        faces = std::move(next);
    }
    return faces;
}

// 2d hull area of points projected to a plane (monotone chain + shoelace)
double planar_hull_area(std::vector<Eigen::Vector2d> q) {
    std::sort(q.begin(), q.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    q.erase(std::unique(q.begin(), q.end(),
                        [](const auto& a, const auto& b) { return (a - b).norm() < 1e-14; }),
            q.end());
    const int m = static_cast<int>(q.size());
    if (m < 3) return 0.0;
    auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Eigen::Vector2d> h(2 * m);
    int k = 0;
    for (int i = 0; i < m; ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], q[i]) <= 0) --k;
        h[k++] = q[i];
    }
    for (int i = m - 2, lower = k + 1; i >= 0; --i) {
        while (k >= lower && cross(h[k - 2], h[k - 1], q[i]) <= 0) --k;
        h[k++] = q[i];
    }
    h.resize(k - 1);
    double area = 0.0;
    for (int i = 0; i < static_cast<int>(h.size()); ++i) {
        const auto& a = h[i];
        const auto& b = h[(i + 1) % h.size()];
        area += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * std::abs(area);
}

} // namespace

AreaMeasure polytope_area_measure(const std::vector<VectorXd>& vertices) {
    if (vertices.empty()) throw std::invalid_argument("polytope without vertices");
    if (vertices.front().size() != 3)
        throw UnsupportedScheme("polytope area measures are implemented for n=3 only");
    std::vector<Vector3d> pts;
    pts.reserve(vertices.size());
    double scale = 0.0;
    for (const auto& v : vertices) {
        pts.emplace_back(v(0), v(1), v(2));
        scale = std::max(scale, pts.back().norm());
    }
    const double eps = 1e-10 * std::max(1.0, scale);

    AreaMeasure out;
    out.ambient_dim = 3;
    try {
        std::vector<Face> faces = hull3d(pts, eps);
        // merge triangle areas by (near-identical) normal
        std::vector<std::pair<Vector3d, double>> raw;
        for (const Face& f : faces) {
            const double area = 0.5 * (pts[f.b] - pts[f.a]).cross(pts[f.c] - pts[f.a]).norm();
            raw.emplace_back(f.normal, area);
        }
        std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
            if (a.first.x() != b.first.x()) return a.first.x() < b.first.x();
            if (a.first.y() != b.first.y()) return a.first.y() < b.first.y();
            return a.first.z() < b.first.z();
        });
        for (const auto& [nrm, area] : raw) {
            if (!out.atoms.empty() && (out.atoms.back().first - nrm).norm() < 1e-9)
                out.atoms.back().second += area;
            else
                out.atoms.emplace_back(nrm, area);
        }
    } catch (const HullFailure& hf) {
        // planar polytopes get the two-sided atom pair; lower rank is an error
        Vector3d c = Vector3d::Zero();
        for (const auto& p : pts) c += p;
        c /= static_cast<double>(pts.size());
        MatrixXd centered(3, pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) centered.col(i) = pts[i] - c;
        Eigen::JacobiSVD<MatrixXd> svd(centered, Eigen::ComputeFullU);
        if (pts.size() < 3 || svd.singularValues()(1) < eps) throw;
        const Vector3d u = svd.matrixU().col(0), v = svd.matrixU().col(1);
        const Vector3d nrm = svd.matrixU().col(2);
        std::vector<Eigen::Vector2d> q;
        q.reserve(pts.size());
        for (const auto& p : pts) q.emplace_back(u.dot(p - c), v.dot(p - c));
        const double area = planar_hull_area(std::move(q));
        if (area < eps) throw HullFailure("polytope_area_measure: degenerate planar input");
        out.atoms.emplace_back(nrm, area);
        out.atoms.emplace_back(-nrm, area);
    }
    return out;
}

AreaMeasure disk_area_measure(const VectorXd& xi, double lambda, int n) {
    const double mass = unit_ball_volume(n - 1) * std::pow(lambda, n - 1);
    AreaMeasure out;
    out.ambient_dim = n;
    out.atoms.emplace_back(xi, mass);
    out.atoms.emplace_back(-xi, mass);
    return out;
}

AreaMeasure cone_area_measure(const VectorXd& xi, double lambda, int n) {
    if (lambda < 1.0) throw std::invalid_argument("cone_area_measure: lambda >= 1 required");
    AreaMeasure out;
    out.ambient_dim = n;
    out.atoms.emplace_back(-xi, unit_ball_volume(n - 1) * std::pow(lambda, n - 1));
    // lateral density per unit H^{n-2} on Sigma; integrating 1 reproduces the
    // lateral area omega_{n-1} lambda^{n-2} sqrt(lambda^2+1)
    const double c = std::pow(lambda, n - 2) * std::pow(lambda * lambda + 1.0, 0.5 * (n - 1)) /
                     static_cast<double>(n - 1);
    out.sheets.push_back(ConeLateral{xi, lambda, c});
    return out;
}

AreaMeasure area_measure(const ConvexBody& k) {
    return std::visit(
        [](const auto& b) -> AreaMeasure {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Polytope>) {
                return polytope_area_measure(b.vertices);
            } else if constexpr (std::is_same_v<T, Ball>) {
                AreaMeasure out;
                out.ambient_dim = 3;
                out.smooth_parts.push_back(SmoothPart{constant(3, b.radius)});
                return out;
            } else if constexpr (std::is_same_v<T, Disk>) {
                return disk_area_measure(b.xi, b.lambda, static_cast<int>(b.xi.size()));
            } else {
                return cone_area_measure(b.xi, b.lambda, static_cast<int>(b.xi.size()));
            }
        },
        k);
}

void subsphere_quadrature(const VectorXd& xi, int resolution, std::vector<VectorXd>& nodes,
                          std::vector<double>& weights) {
    const int n = static_cast<int>(xi.size());
    nodes.clear();
    weights.clear();
    // orthonormal basis of xi-perp
    MatrixXd basis(n, n - 1);
    {
        Eigen::FullPivHouseholderQR<MatrixXd> qr(xi);
        const MatrixXd q = qr.matrixQ();
        int col = 0;
        for (int j = 0; j < n; ++j) {
            if (std::abs(q.col(j).dot(xi)) > 0.5) continue;
            basis.col(col++) = q.col(j);
        }
        if (col != n - 1) throw std::logic_error("subsphere_quadrature: basis construction failed");
    }
    if (n == 3) {
        const int m = std::max(resolution, 4);
        for (int j = 0; j < m; ++j) {
            const double th = 2.0 * std::numbers::pi * j / m;
            nodes.push_back(std::cos(th) * basis.col(0) + std::sin(th) * basis.col(1));
            weights.push_back(2.0 * std::numbers::pi / m);
        }
    } else if (n == 4) {
        const QuadratureGrid g = product_gauss_grid(std::max(resolution / 8, 8));
        for (Eigen::Index i = 0; i < g.count(); ++i) {
            nodes.push_back(basis * g.nodes.col(i));
            weights.push_back(g.weights(i));
        }
    } else {
        throw UnsupportedScheme("subsphere_quadrature: n in {3,4} only");
    }
}

double measure_pair(const AreaMeasure& s, const ScalarFn& g, int sheet_resolution,
                    const QuadratureGrid* grid) {
    std::vector<double> parts;
    for (const auto& [dir, mass] : s.atoms) parts.push_back(mass * g(dir));
    for (const ConeLateral& sheet : s.sheets) {
        std::vector<VectorXd> nodes;
        std::vector<double> w;
        subsphere_quadrature(sheet.xi, sheet_resolution, nodes, w);
        const double lam = sheet.lambda;
        const double root = std::sqrt(1.0 + lam * lam);
        // H^{n-2} on Sigma pulled back to the unit sphere of xi-perp
        const double jac = std::pow(1.0 + lam * lam, -0.5 * (s.ambient_dim - 2));
        std::vector<double> vals(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const VectorXd x = (lam * sheet.xi + nodes[i]) / root;
            vals[i] = w[i] * g(x);
        }
        parts.push_back(sheet.coefficient * jac * detail::pairwise_sum(vals, 0, vals.size()));
    }
    if (!s.smooth_parts.empty()) {
        QuadratureGrid fallback;
        if (!grid) fallback = icosphere_grid(6);
        const QuadratureGrid& gr = grid ? *grid : fallback;
        for (const SmoothPart& part : s.smooth_parts) {
            parts.push_back(integrate(gr, [&](const Eigen::Ref<const VectorXd>& x) {
                return g(x) * smooth_area_density(part.support, x);
            }));
        }
    }
    return detail::pairwise_sum(parts, 0, parts.size());
}

double AreaMeasure::total_mass(int sheet_resolution) const {
    return measure_pair(*this, [](const Eigen::Ref<const VectorXd>&) { return 1.0; },
                        sheet_resolution);
}

void AreaMeasure::write_csv(std::ostream& os) const {
    os.precision(17);
    os << "type,params,mass_or_coeff\n";
    for (const auto& [dir, mass] : atoms) {
        os << "atom,";
        for (int j = 0; j < dir.size(); ++j) os << dir(j) << (j + 1 < dir.size() ? ' ' : ',');
        os << mass << '\n';
    }
    for (const auto& sh : sheets) {
        os << "sheet,";
        for (int j = 0; j < sh.xi.size(); ++j) os << sh.xi(j) << ' ';
        os << "lambda=" << sh.lambda << ',' << sh.coefficient << '\n';
    }
    for (std::size_t i = 0; i < smooth_parts.size(); ++i) os << "smooth,part" << i << ",-\n";
}

double smooth_area_density(const ScalarField& h, const Eigen::Ref<const VectorXd>& x) {
    if (h.ambient_dim() != 3)
        throw UnsupportedScheme("smooth_area_density: n=3 only");
    const MatrixXd a = sph_hess(h, x);
    // S_2 of the tangent block = e_2 of the full spectrum (x is in the kernel)
    const double tr = a.trace();
    return 0.5 * (tr * tr - (a * a).trace());
}

} // namespace sphereval
