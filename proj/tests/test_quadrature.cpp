#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <sstream>

#include "sphereval/quadrature.hpp"

using namespace sphereval;
using Eigen::VectorXd;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("dimensional constants") {
    CHECK(sphere_area(1) == doctest::Approx(2 * kPi).epsilon(1e-14));
    CHECK(sphere_area(2) == doctest::Approx(4 * kPi).epsilon(1e-14));
    CHECK(sphere_area(3) == doctest::Approx(2 * kPi * kPi).epsilon(1e-14));
    CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(unit_ball_volume(2) == doctest::Approx(kPi).epsilon(1e-14));
    CHECK(unit_ball_volume(3) == doctest::Approx(4 * kPi / 3).epsilon(1e-14));
}

TEST_CASE("icosphere construction") {
    auto g0 = icosphere_grid(0);
    CHECK(g0.count() == 20);
    CHECK(g0.weights.sum() == doctest::Approx(4 * kPi).epsilon(1e-12));

    auto g5 = icosphere_grid(5);
    CHECK(g5.count() == 20 * 1024);
    CHECK(g5.weights.sum() == doctest::Approx(4 * kPi).epsilon(1e-12));
    CHECK(g5.weights.minCoeff() > 0.0);
    for (Eigen::Index i = 0; i < g5.count(); i += 997)
        CHECK(std::abs(g5.nodes.col(i).norm() - 1.0) < 1e-12);
}

TEST_CASE("icosphere accuracy at level 5") {
    auto g = icosphere_grid(5);
    auto one = [](const Eigen::Ref<const VectorXd>&) { return 1.0; };
    auto x1sq = [](const Eigen::Ref<const VectorXd>& x) { return x(0) * x(0); };
    auto x1q = [](const Eigen::Ref<const VectorXd>& x) { return std::pow(x(0), 4); };
    CHECK(std::abs(integrate(g, one) - 4 * kPi) / (4 * kPi) < 1e-3);
    CHECK(std::abs(integrate(g, x1sq) - 4 * kPi / 3) / (4 * kPi / 3) < 1e-3);
    CHECK(std::abs(integrate(g, x1q) - 4 * kPi / 5) / (4 * kPi / 5) < 1e-3);
}

TEST_CASE("monte carlo grid") {
    auto g = monte_carlo_grid(4, 10000, 42);
    CHECK(g.count() == 10000);
    CHECK(g.weights(0) == doctest::Approx(2 * kPi * kPi / 10000).epsilon(1e-14));
    CHECK(g.weights.sum() == doctest::Approx(2 * kPi * kPi).epsilon(1e-12));

    auto g2 = monte_carlo_grid(4, 10000, 42);
    CHECK((g.nodes - g2.nodes).cwiseAbs().maxCoeff() == 0.0); // bit-identical

    auto g3 = monte_carlo_grid(4, 10000, 7);
    CHECK((g.nodes - g3.nodes).cwiseAbs().maxCoeff() > 0.0);

    // sigma/n identity on S^3
    auto big = monte_carlo_grid(4, 200000, 1);
    auto x1sq = [](const Eigen::Ref<const VectorXd>& x) { return x(0) * x(0); };
    CHECK(integrate(big, x1sq) ==
          doctest::Approx(sphere_area(3) / 4).epsilon(0.02));
}

TEST_CASE("product gauss exactness") {
    auto g = product_gauss_grid(8);
    auto x3sq = [](const Eigen::Ref<const VectorXd>& x) { return x(2) * x(2); };
    CHECK(integrate(g, x3sq) == doctest::Approx(4 * kPi / 3).epsilon(1e-13));
    CHECK(g.weights.sum() == doctest::Approx(4 * kPi).epsilon(1e-13));
}

TEST_CASE("integrate basics") {
    auto g = icosphere_grid(3);
    auto odd = [](const Eigen::Ref<const VectorXd>& x) { return x(0); };
    CHECK(std::abs(integrate(g, odd)) < 1e-12);

    auto id = [](const Eigen::Ref<const VectorXd>& x) -> VectorXd { return x; };
    CHECK(integrate_vec(g, id).norm() < 1e-12);

    auto x1x = [](const Eigen::Ref<const VectorXd>& x) -> VectorXd { return x(0) * x; };
    VectorXd m = integrate_vec(g, x1x);
    CHECK(m(0) == doctest::Approx(4 * kPi / 3).epsilon(1e-3));
    CHECK(std::abs(m(1)) < 1e-10);
    CHECK(std::abs(m(2)) < 1e-10);

    Eigen::Vector3d v(1.5, -2.0, 0.25);
    auto cst = [&](const Eigen::Ref<const VectorXd>&) -> VectorXd { return v; };
    CHECK((integrate_vec(g, cst) - 4 * kPi * v).norm() < 1e-10);
}

TEST_CASE("integrate linearity") {
    auto g = icosphere_grid(2);
    auto f1 = [](const Eigen::Ref<const VectorXd>& x) { return x(0) * x(0) + 0.3; };
    auto f2 = [](const Eigen::Ref<const VectorXd>& x) { return std::sin(x(1)); };
    auto combo = [&](const Eigen::Ref<const VectorXd>& x) { return 2.5 * f1(x) - 0.7 * f2(x); };
    const double lhs = integrate(g, combo);
    const double rhs = 2.5 * integrate(g, f1) - 0.7 * integrate(g, f2);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(build_grid(4, 3, Scheme::Icosphere), UnsupportedScheme);
    auto g = icosphere_grid(0);
    auto bad = [](const Eigen::Ref<const VectorXd>&) {
        return std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS_AS(integrate(g, bad), NonFiniteValue);
}

TEST_CASE("csv dump") {
    auto g = icosphere_grid(0);
    std::ostringstream os;
    g.write_csv(os);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "3,20,icosphere,0");
    int rows = 0;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 20);
}
