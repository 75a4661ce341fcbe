// test_quadrature.cpp: adaptive Gauss-Kronrod driver and fixed rules.
#include <cmath>
#include <vector>

#include "doctest.h"

#include "nmqd/quadrature.hpp"

using namespace nmqd;

TEST_SUITE("quadrature") {

TEST_CASE("Kronrod and Gauss weights each integrate a constant over [-1, 1]")
{
    const auto& t = quad::kronrod31();
    double k = t.kronrod_weights[0], g = t.gauss_weights[0];
    for (std::size_t i = 1; i < 16; ++i) k += 2.0 * t.kronrod_weights[i];
    for (std::size_t i = 1; i < 8; ++i) g += 2.0 * t.gauss_weights[i];
    CHECK(k == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(g == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("smooth integrands reach full accuracy")
{
    const auto r = quad::integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
    CHECK(std::abs(r.value - (std::exp(1.0) - 1.0)) < 1e-13);
    const auto osc = quad::integrate([](double x) { return std::cos(50.0 * x); }, 0.0, 2.0);
    CHECK(std::abs(osc.value - std::sin(100.0) / 50.0) < 1e-12);
}

TEST_CASE("endpoint singularities converge with geometric breaks")
{
    const auto breaks = quad::geometric_breaks(0.0, 1e-8, 1.0);
    const auto r = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, breaks);
    CHECK(std::abs(r.value - 2.0) < 1e-8);
}

TEST_CASE("geometric breaks grow by the factor and stay below the last offset")
{
    const auto b = quad::geometric_breaks(1.0, 0.01, 5.0, 10.0);
    REQUIRE(b.size() == 3);
    CHECK(b[0] == doctest::Approx(1.01));
    CHECK(b[1] == doctest::Approx(1.1));
    CHECK(b[2] == doctest::Approx(2.0));
}

TEST_CASE("non-integrable integrands raise QuadratureError")
{
    quad::Tolerance tol;
    tol.max_panels = 200;
    CHECK_THROWS_AS(quad::integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, {}, tol), QuadratureError);
}

TEST_CASE("six-point Gauss-Legendre is exact through degree eleven on [0, 1]")
{
    const auto& rule = quad::gauss_legendre6();
    for (int degree = 0; degree <= 11; ++degree) {
        double sum = 0.0;
        for (std::size_t i = 0; i < 6; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], degree);
        CHECK(sum == doctest::Approx(1.0 / (degree + 1)).epsilon(1e-13));
    }
}

}
