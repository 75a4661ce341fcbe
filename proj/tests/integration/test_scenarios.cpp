// test_scenarios.cpp: built-in presets run end to end through the pipeline.
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "nmqd/oracle.hpp"
#include "nmqd/pipeline.hpp"

using namespace nmqd;

namespace {

ScenarioConfig preset(const std::string& name) { return std::get<ScenarioConfig>(load_config(preset_path(name))); }

} // namespace

TEST_CASE("fig3c preset ends in a qumemory whose amplitude matches the localized mode")
{
    const ScenarioConfig config = preset("fig3c");
    const ScenarioResult r = simulate(config, 4);
    REQUIRE(r.classification.has_value());
    CHECK(r.classification->label == SteadyStateLabel::Qumemory);
    REQUIRE(r.modes.size() == 1);
    CHECK(std::abs(r.u.u.back()) == doctest::Approx(r.modes[0].amplitude).epsilon(2e-3));
    REQUIRE(r.frames.size() == 5);
    for (const auto& frame : r.frames) CHECK(frame.integral() == doctest::Approx(1.0).epsilon(1e-3));
    for (const auto& state : r.states) {
        CHECK(std::abs(state.rho.trace() - 1.0) < 1e-8);
        CHECK(min_eigenvalue(state) > -1e-8);
    }
}

TEST_CASE("fig3d preset oscillates between two localized modes")
{
    const ScenarioConfig config = with_overrides(preset("fig3d"), {"unused", 1, {}, 30.0});
    const ScenarioResult r = simulate(config, 4);
    REQUIRE(r.classification.has_value());
    CHECK(r.classification->label == SteadyStateLabel::OscillatingQumemory);
    CHECK(r.modes.size() == 2);
    CHECK(r.classification->evidence.u_asymptote == doctest::Approx(0.875).epsilon(1e-6));
}

TEST_CASE("short fig3b run is inconclusive and says why")
{
    const ScenarioConfig config = with_overrides(preset("fig3b"), {"unused", 1, {}, 5.0});
    ScenarioConfig light = config;
    light.outputs.wigner_times = {0.0, 5.0};
    light.outputs.state_times = {5.0};
    const ScenarioResult r = simulate(light, 2);
    CHECK_FALSE(r.classification.has_value());
    CHECK(r.inconclusive_reason.find("raise the horizon") != std::string::npos);
    const nlohmann::json summary = classification_json(light, r);
    CHECK(summary["label"] == "Inconclusive");
}

TEST_CASE("tight-binding preset sweeps the detuning axis")
{
    const auto config = std::get<PhaseDiagramConfig>(load_config(preset_path("tight-binding")));
    const PhaseDiagram d = compute_phase_diagram(config, 4);
    CHECK(d.failures == 0);
    CHECK(d.eta.size() == 50);
    CHECK(d.second.size() == 50);
    // Above sqrt(2 + |detuning| / xi) at least one mode exists; well below none does.
    for (std::size_t j = 0; j < d.second.size(); ++j)
        for (std::size_t i = 0; i < d.eta.size(); ++i) {
            const double eta_c = std::sqrt(2.0 + std::abs(d.second[j]) / 0.25);
            if (d.eta[i] > 1.02 * eta_c) CHECK(d.at(i, j) > 0.0);
        }
    CHECK(d.at(0, 25) == 0.0);
}

TEST_CASE("a fermionic scenario with a tabulated band runs and stays physical")
{
    const auto dir = std::filesystem::temp_directory_path() / "nmqd_integration_fermion";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "band.csv") << "omega,J\n0.5,0\n1,0.4\n1.5,0\n";
    std::ofstream(dir / "fermion.json") << R"({
      "system": {"omega_s": 1.0, "statistics": "fermion"},
      "bath": {"temperature": 0.3, "mu": 0.9},
      "spectral_density": {"type": "tabulated", "csv": "band.csv"},
      "initial_state": {"type": "fock", "coefficients": [0, 1]},
      "time": {"horizon": 30},
      "outputs": {"states": [0, 15, 30], "classification": false}
    })";
    const auto config = std::get<ScenarioConfig>(load_config(dir / "fermion.json"));
    run_scenario(config, {dir / "run", 1, {}, {}});
    const ScenarioResult r = simulate(config);
    CHECK(r.n_max == 1);
    const DiscretizedBath bath = discretize(config.spectral, 400);
    for (const auto& state : r.states) {
        CHECK(state.rho.rows() == 2);
        CHECK(std::abs(state.rho.trace() - 1.0) < 1e-12);
        CHECK(min_eigenvalue(state) > -1e-12);
    }
    const double exact = std::norm(exact_u(bath, config.system, 30.0)) +
                         exact_v(bath, config.system, config.bath, Statistics::Fermion, 30.0);
    CHECK(mean_particle_number(r.states.back()) == doctest::Approx(exact).epsilon(5e-3));
    CHECK(std::filesystem::is_regular_file(dir / "run" / "state_002_30.json"));
    std::filesystem::remove_all(dir);
}
