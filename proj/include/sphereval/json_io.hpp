#pragma once

#include <json.hpp>

#include <string>

#include "sphereval/bodies.hpp"
#include "sphereval/fields.hpp"
#include "sphereval/quadrature.hpp"
#include "sphereval/valuations.hpp"

namespace sphereval {

/// `icosphere:<level>` | `gauss:<order>` | `mc:<count>:seed<seed>`.
/// n_hint selects the sphere dimension for Monte Carlo grids.
QuadratureGrid parse_grid_spec(const std::string& spec, int n_hint = 3);

nlohmann::json load_json(const std::string& path);

ScalarField parse_field(const nlohmann::json& j);
ConvexBody parse_body(const nlohmann::json& j);
Valuation parse_valuation(const nlohmann::json& j);

} // namespace sphereval
