// test_greens.cpp: propagator and correlation solvers, density of states and steady values.
#include <cmath>

#include "doctest.h"

#include "nmqd/greens.hpp"
#include "nmqd/oracle.hpp"

using namespace nmqd;

namespace {

const SystemParams boson{1.0, Statistics::Boson};

double max_error(const PropagatorTrace& u, const std::function<Complex(double)>& exact)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < u.u.size(); ++i) worst = std::max(worst, std::abs(u.u[i] - exact(u.grid.time(i))));
    return worst;
}

} // namespace

TEST_SUITE("greens") {

TEST_CASE("time grids cover the requested horizon")
{
    const TimeGrid g = TimeGrid::covering(1.0, 0.3);
    CHECK(g.n_steps == 4);
    CHECK(g.horizon() >= 1.0);
    CHECK(g.time(2) == doctest::Approx(0.6));
    CHECK_THROWS_AS(TimeGrid::covering(1.0, 0.0), InvalidArgument);
}

TEST_CASE("default time step resolves the band top")
{
    CHECK(default_time_step(OhmicFamily{0.1, 1.0, 5.0}, boson) == doctest::Approx(0.01));
    CHECK(default_time_step(OhmicFamily{0.1, 1.0, 50.0}, boson) == doctest::Approx(0.002));
    CHECK(default_time_step(TightBinding{3.0, 0.25, 1.0}, boson) == doctest::Approx(0.01));
}

TEST_CASE("an empty reservoir gives free rotation")
{
    const PropagatorTrace u = solve_u(OhmicFamily{0.0, 1.0, 5.0}, {2.0, Statistics::Boson}, TimeGrid::covering(10.0, 0.01));
    CHECK(max_error(u, [](double t) { return std::polar(1.0, -2.0 * t); }) < 1e-12);
    for (const Complex& x : u.u) CHECK(std::abs(x) == doctest::Approx(1.0));
}

TEST_CASE("constant kernel gives a cosine")
{
    // u' = -k int_0^t u with u(0) = 1 and no rotation is u'' = -k u.
    const double k = 4.0;
    auto kernel = [&](double) { return Complex(k, 0.0); };
    auto exact = [](double t) { return Complex(std::cos(2.0 * t), 0.0); };
    const double coarse = max_error(solve_u_with_kernel(kernel, 0.0, TimeGrid::covering(10.0, 0.02)), exact);
    const double fine = max_error(solve_u_with_kernel(kernel, 0.0, TimeGrid::covering(10.0, 0.01)), exact);
    // Second order: the error is a few (omega dt)^2 per unit phase and quarters when dt halves.
    CHECK(fine < 1e-3);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("exponential kernel gives a damped oscillator, converging with the step")
{
    // g = k exp(-l tau) turns the equation into u'' + l u' + k u = 0, u'(0) = 0.
    const double k = 2.0, l = 0.5;
    const double w = std::sqrt(k - 0.25 * l * l);
    auto exact = [&](double t) { return Complex(std::exp(-0.5 * l * t) * (std::cos(w * t) + 0.5 * l / w * std::sin(w * t)), 0.0); };
    auto kernel = [&](double tau) { return Complex(k * std::exp(-l * tau), 0.0); };
    const double coarse = max_error(solve_u_with_kernel(kernel, 0.0, TimeGrid::covering(20.0, 0.04)), exact);
    const double fine = max_error(solve_u_with_kernel(kernel, 0.0, TimeGrid::covering(20.0, 0.02)), exact);
    CHECK(fine < 5e-4);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("correlation of a frozen propagator under constant noise grows as t^2")
{
    const TimeGrid grid = TimeGrid::covering(5.0, 0.05);
    const PropagatorTrace u = solve_u_with_kernel([](double) { return Complex(0.0, 0.0); }, 0.0, grid);
    const std::vector<Complex> noise(grid.size(), Complex(0.3, 0.0));
    const CorrelationTrace v = solve_v(noise, u);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(v.v[i] == doctest::Approx(0.3 * std::pow(grid.time(i), 2)).epsilon(1e-10));
}

TEST_CASE("zero temperature bosonic bath injects nothing")
{
    const OhmicFamily J{0.2, 1.0, 5.0};
    const PropagatorTrace u = solve_u(J, boson, TimeGrid::covering(5.0, 0.01));
    const CorrelationTrace v = solve_v(J, boson, {0.0, 0.0}, u);
    for (const double x : v.v) CHECK(x == 0.0);
}

TEST_CASE("propagator and correlation agree with the discretized-bath oracle")
{
    const OhmicFamily J{0.1, 1.0, 5.0};
    const TimeGrid grid = TimeGrid::covering(10.0, 0.01);
    const PropagatorTrace u = solve_u(J, boson, grid);
    const CorrelationTrace v = solve_v(J, boson, {2.0, 0.0}, u);
    const DiscretizedBath bath = discretize(J, 400);
    const PropagatorTrace eu = exact_u_trace(bath, boson, grid);
    const CorrelationTrace ev = exact_v_trace(bath, boson, {2.0, 0.0}, grid);
    for (std::size_t i = 0; i < grid.size(); i += 50) {
        CHECK(std::abs(u.u[i] - eu.u[i]) < 1e-3);
        CHECK(std::abs(v.v[i] - ev.v[i]) < 1e-3);
    }
}

TEST_CASE("late propagator approaches the localized-mode asymptote")
{
    const OhmicFamily J{0.5, 1.0, 5.0};
    const PropagatorTrace u = solve_u(J, boson, TimeGrid::covering(40.0, 0.01));
    const auto modes = localized_modes(J, boson);
    REQUIRE(modes.size() == 1);
    const Complex late = asymptotic_u(modes, u.grid.horizon());
    CHECK(std::abs(u.u.back() - late) < 2e-3);
    CHECK(std::abs(late) == doctest::Approx(modes[0].amplitude));
}

TEST_CASE("sum rule: continuum weight plus mode residues is one")
{
    for (const SpectralDensity& J : {SpectralDensity{OhmicFamily{0.1, 1.0, 5.0}}, SpectralDensity{OhmicFamily{0.5, 1.0, 5.0}},
                                     SpectralDensity{OhmicFamily{0.3, 0.5, 2.0}}, SpectralDensity{TightBinding{3.0, 0.25, 1.0}},
                                     SpectralDensity{TightBinding{1.0, 0.3, 1.2}}}) {
        double residues = 0.0;
        for (const auto& m : localized_modes(J, boson)) residues += m.amplitude;
        CHECK(continuum_weight(J, boson) + residues == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("density of states is a normalized Lorentzian in the weak-coupling limit")
{
    const OhmicFamily J{1e-3, 1.0, 10.0};
    const double peak = density_of_states(J, boson, 1.0 + principal_self_energy(J, 1.0));
    const double width = evaluate(J, 1.0);
    CHECK(peak == doctest::Approx(2.0 / (pi * width)).epsilon(2e-2));
    CHECK_THROWS_AS(density_of_states(J, boson, -0.5), InvalidArgument);
}

TEST_CASE("steady correlation below criticality equals the long-time trace")
{
    const OhmicFamily J{0.1, 1.0, 5.0};
    const BathParams bath{2.0, 0.0};
    const PropagatorTrace u = solve_u(J, boson, TimeGrid::covering(100.0, 0.02));
    const CorrelationTrace v = solve_v(J, boson, bath, u);
    const SteadyV steady = steady_v(J, boson, bath);
    CHECK_FALSE(steady.continuum_only);
    CHECK(v.v.back() == doctest::Approx(steady.value).epsilon(5e-3));
    CHECK(steady_v(OhmicFamily{0.5, 1.0, 5.0}, boson, bath).continuum_only);
}

TEST_CASE("steady time detects when the windowed amplitude stops changing")
{
    PropagatorTrace u;
    u.grid = TimeGrid::covering(100.0, 0.1);
    for (std::size_t i = 0; i < u.grid.size(); ++i) {
        const double t = u.grid.time(i);
        u.u.push_back(std::polar(0.5 + 0.5 * std::exp(-t), -t));
    }
    const auto settled = steady_time(u);
    REQUIRE(settled.has_value());
    CHECK(*settled > 5.0);
    CHECK(*settled < 20.0);
    PropagatorTrace growing = u;
    for (std::size_t i = 0; i < growing.u.size(); ++i) growing.u[i] = 0.01 * u.grid.time(i);
    CHECK_FALSE(steady_time(growing).has_value());
}

}
