#include "sphereval/json_io.hpp"

#include <fstream>

namespace sphereval {

using nlohmann::json;
using Eigen::MatrixXd;
using Eigen::VectorXd;

QuadratureGrid parse_grid_spec(const std::string& spec, int n_hint) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("grid spec: expected scheme:params, got " + spec);
    const std::string scheme = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (scheme == "icosphere") return icosphere_grid(std::stoi(rest));
    if (scheme == "gauss") return product_gauss_grid(std::stoi(rest));
    if (scheme == "mc") {
        const auto c2 = rest.find(":seed");
        if (c2 == std::string::npos)
            throw std::invalid_argument("grid spec: mc:<count>:seed<seed> expected");
        const long count = std::stol(rest.substr(0, c2));
        const auto seed = static_cast<std::uint64_t>(std::stoull(rest.substr(c2 + 5)));
        return monte_carlo_grid(n_hint, count, seed);
    }
    throw std::invalid_argument("grid spec: unknown scheme " + scheme);
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    json j;
    in >> j;
    return j;
}

namespace {

VectorXd to_vector(const json& j) {
    VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
    return v;
}

MatrixXd to_matrix(const json& j) {
    const std::size_t rows = j.size(), cols = j.at(0).size();
    MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    return m;
}

std::complex<double> to_complex(const json& j) {
    if (j.is_number()) return j.get<double>();
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

} // namespace

ScalarField parse_field(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "const") return constant(j.at("n").get<int>(), j.at("value").get<double>());
    if (type == "linear") return linear(to_vector(j.at("v")));
    if (type == "disk_support")
        return disk_support(to_vector(j.at("xi")), j.at("lambda").get<double>());
    if (type == "scale") return scale(j.at("t").get<double>(), parse_field(j.at("child")));
    if (type == "gl") return gl_act(to_matrix(j.at("g")), parse_field(j.at("child")));
    if (type == "sum" || type == "min" || type == "max") {
        std::vector<ScalarField> children;
        for (const auto& c : j.at("children")) children.push_back(parse_field(c));
        if (type == "sum") return sum(children);
        return type == "min" ? meet(children) : join(children);
    }
    if (type == "poly") {
        std::vector<Monomial> terms;
        for (const auto& t : j.at("terms")) {
            Monomial m;
            m.coef = t.at("coef").get<double>();
            for (const auto& e : t.at("exps")) m.exps.push_back(e.get<int>());
            terms.push_back(std::move(m));
        }
        return poly_field(j.at("n").get<int>(), terms);
    }
    throw std::invalid_argument("field json: unknown type " + type);
}

ConvexBody parse_body(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "polytope") {
        Polytope p;
        for (const auto& v : j.at("vertices")) p.vertices.push_back(to_vector(v));
        return p;
    }
    if (type == "ball") return Ball{j.at("radius").get<double>()};
    if (type == "disk") return Disk{to_vector(j.at("xi")), j.at("lambda").get<double>()};
    if (type == "cone") return Cone{to_vector(j.at("xi")), j.at("lambda").get<double>()};
    throw std::invalid_argument("body json: unknown type " + type);
}

Valuation parse_valuation(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "theta1") return make_theta1(parse_field(j.at("phi")));
    if (type == "theta2") {
        const std::string density = j.at("density").get<std::string>();
        if (density == "even") return make_theta2(even_density(j.value("n", 3)));
        if (density == "odd") return make_theta2(odd_density(parse_field(j.at("psi"))));
        throw std::invalid_argument("theta2 json: unknown density " + density);
    }
    if (type == "rotinv")
        return make_rotinv(to_complex(j.at("c0")), to_complex(j.at("c1")),
                           to_complex(j.at("c2")));
    if (type == "area_integral") {
        // only the paper's default density is exposed through json
        const std::string p = j.value("p", "x1^3");
        if (p != "x1^3") throw std::invalid_argument("area_integral json: only p = x1^3");
        return make_area_integral(
            [](const Eigen::Ref<const VectorXd>& x) { return std::pow(x(0), 3); });
    }
    if (type == "hess_s2") return make_hess_s2(parse_field(j.at("psi")));
    throw std::invalid_argument("valuation json: unknown type " + type);
}

} // namespace sphereval
