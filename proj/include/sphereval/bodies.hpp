#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <variant>
#include <vector>

#include "sphereval/fields.hpp"
#include "sphereval/quadrature.hpp"

namespace sphereval {

struct Polytope {
    std::vector<Eigen::VectorXd> vertices;
};
struct Ball {
    double radius = 1.0;
};
/// lambda * D_xi - xi, the (n-1)-disk of radius lambda in xi-perp shifted by -xi.
struct Disk {
    Eigen::VectorXd xi;
    double lambda = 1.0;
};
/// C_{xi,lambda} = conv((lambda D_xi - xi) u {0}).
struct Cone {
    Eigen::VectorXd xi;
    double lambda = 1.0;
};

using ConvexBody = std::variant<Polytope, Ball, Disk, Cone>;

int body_dim(const ConvexBody& k);

/// Singular sheet of a cone's area measure: coefficient * H^{n-2} on
/// Sigma_{xi,lambda} = {(lambda xi + eta)/sqrt(lambda^2+1) : eta unit in xi-perp}.
struct ConeLateral {
    Eigen::VectorXd xi;
    double lambda = 1.0;
    double coefficient = 0.0;
};

struct SmoothPart {
    ScalarField support; // smooth support field h; density S_{n-1}(hess h + h Id)
};

/// Surface area measure split into atoms, singular sheets and smooth parts.
struct AreaMeasure {
    int ambient_dim = 3;
    std::vector<std::pair<Eigen::VectorXd, double>> atoms; // (unit direction, mass >= 0)
    std::vector<ConeLateral> sheets;
    std::vector<SmoothPart> smooth_parts;

    double total_mass(int sheet_resolution = 256) const;
    void write_csv(std::ostream& os) const;
};

/// h_K restricted to the sphere, as a field tree.
ScalarField support_field(const ConvexBody& k);

/// Facet atoms of the 3d convex hull of the vertices. Planar inputs yield the
/// two-sided atom pair; inputs of affine rank < 2 throw HullFailure.
AreaMeasure polytope_area_measure(const std::vector<Eigen::VectorXd>& vertices);

AreaMeasure disk_area_measure(const Eigen::VectorXd& xi, double lambda, int n);
AreaMeasure cone_area_measure(const Eigen::VectorXd& xi, double lambda, int n);

AreaMeasure area_measure(const ConvexBody& k);

/// integral of g against the measure. Sheets are integrated by the exact
/// parametrization of Sigma over the unit sphere of xi-perp; smooth parts by
/// grid integration of g times the curvature density (default icosphere:6).
double measure_pair(const AreaMeasure& s, const ScalarFn& g, int sheet_resolution = 256,
                    const QuadratureGrid* grid = nullptr);

/// Density of S_{n-1}(K,.) for a smooth support field (n=3): det of the
/// tangent block of sph_hess(h, x).
double smooth_area_density(const ScalarField& h, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Nodes and weights for the unit sphere of the hyperplane perp to xi,
/// embedded in R^n. Exact total mass sigma_{n-2}.
void subsphere_quadrature(const Eigen::VectorXd& xi, int resolution,
                          std::vector<Eigen::VectorXd>& nodes, std::vector<double>& weights);

} // namespace sphereval
