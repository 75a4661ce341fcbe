// test_config.cpp: configuration parsing, validation diagnostics and presets.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

#include "nmqd/config.hpp"

using namespace nmqd;

namespace {

const char* minimal = R"({
  "spectral_density": {"type": "ohmic", "eta": 0.1, "omega_c": 5},
  "time": {"horizon": 10}
})";

std::string error_of(const std::string& text)
{
    try {
        parse_config(text, "test.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("a minimal scenario takes the documented defaults")
{
    const auto config = std::get<ScenarioConfig>(parse_config(minimal, "test.json"));
    CHECK(config.system.omega_s == 1.0);
    CHECK(config.system.statistics == Statistics::Boson);
    CHECK(config.bath.temperature == 0.0);
    CHECK(config.horizon == 10.0);
    CHECK_FALSE(config.dt.has_value());
    CHECK_FALSE(config.n_max.has_value());
    const auto& J = std::get<OhmicFamily>(config.spectral);
    CHECK(J.s == 1.0);
    CHECK(std::holds_alternative<CatSpec>(config.initial_state));
    CHECK(config.outputs.traces);
    CHECK(config.wigner_grid == PhaseSpaceGrid{});
}

TEST_CASE("a full scenario parses every section")
{
    const auto config = std::get<ScenarioConfig>(parse_config(R"({
      "kind": "scenario", "name": "full", "description": "all keys",
      "system": {"omega_s": 1.5, "statistics": "fermion"},
      "bath": {"temperature": 0.5, "mu": 0.2},
      "spectral_density": {"type": "tight_binding", "eta": 1, "xi": 0.3, "omega_c": 1.2},
      "initial_state": {"type": "fock", "coefficients": [[0.6, 0], [0, 0.8]]},
      "time": {"horizon": 20, "dt": 0.005},
      "outputs": {"traces": false, "coefficients": true, "classification": false, "trace_stride": 4,
                  "states": [0, 5], "wigner": []},
      "wigner_grid": {"x": [-3, 3], "p": [-2, 2], "points": [61, 41]}
    })", "full.json"));
    CHECK(config.name == "full");
    CHECK(config.system.statistics == Statistics::Fermion);
    CHECK(config.bath.mu == 0.2);
    CHECK(std::get<TightBinding>(config.spectral).xi == 0.3);
    CHECK(*config.dt == 0.005);
    CHECK(config.outputs.trace_stride == 4);
    CHECK(config.outputs.state_times == std::vector<double>{0.0, 5.0});
    CHECK(config.wigner_grid.p_points == 41);
    const InitialState init = build_initial_state(config, effective_n_max(config, 0.0));
    CHECK(init.statistics == Statistics::Fermion);
    CHECK(std::abs(init.coefficients[1] - Complex(0.0, 0.8)) < 1e-15);
    CHECK(effective_n_max(config, 3.0) == 1);
}

TEST_CASE("boson truncation defaults widen with the expected injection")
{
    auto config = std::get<ScenarioConfig>(parse_config(minimal, "test.json"));
    CHECK(effective_n_max(config, 0.0) == 30);
    CHECK(effective_n_max(config, 4.0) == 50);
    config.n_max = 12;
    CHECK(effective_n_max(config, 4.0) == 12);
}

TEST_CASE("diagnostics name the document and the offending field")
{
    CHECK(error_of(R"({"spectral_density": {"type": "ohmic", "eta": 0.1, "omega_c": 5, "bogus": 1}, "time": {"horizon": 1}})") ==
          "test.json: spectral_density.bogus: unknown key");
    CHECK(error_of(R"({"spectral_density": {"type": "ohmic", "eta": 0.1, "omega_c": 5}})") ==
          "test.json: time: missing required object");
    CHECK(error_of(R"({"spectral_density": {"type": "ohmic", "eta": -1, "omega_c": 5}, "time": {"horizon": 1}})")
              .find("test.json: spectral_density") == 0);
    CHECK(error_of(R"({"spectral_density": {"type": "lorentz"}, "time": {"horizon": 1}})").find("spectral_density.type") !=
          std::string::npos);
    CHECK(error_of(R"({"spectral_density": {"type": "ohmic", "eta": 0.1, "omega_c": 5}, "time": {"horizon": -1}})") ==
          "test.json: time.horizon: must be positive");
    CHECK(error_of("{\n  \"time\": {\"horizon\": 1,}\n}").rfind("test.json:2:", 0) == 0);
    CHECK(error_of(R"({"kind": "movie"})").find("kind") != std::string::npos);
    CHECK(error_of(R"({"system": {"statistics": "fermion"}, "spectral_density": {"type": "ohmic", "eta": 0.1, "omega_c": 5},
                       "time": {"horizon": 1}})").find("initial_state") != std::string::npos);
    CHECK(error_of(R"({"spectral_density": {"type": "ohmic", "eta": 0.1, "omega_c": 5}, "time": {"horizon": 1},
                       "initial_state": {"type": "fock", "coefficients": [0.5, 0.5]}})").find("initial_state") != std::string::npos);
}

TEST_CASE("tabulated densities load inline or from a CSV next to the config")
{
    const auto dir = std::filesystem::temp_directory_path() / "nmqd_config_table";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "J.csv") << "omega,J\n0,0\n1,2\n2,0\n";
    std::ofstream(dir / "scenario.json")
        << R"({"spectral_density": {"type": "tabulated", "csv": "J.csv"}, "time": {"horizon": 1}})";
    const auto from_file = std::get<ScenarioConfig>(load_config(dir / "scenario.json"));
    CHECK(std::get<Tabulated>(from_file.spectral).values == std::vector<double>{0.0, 2.0, 0.0});
    const auto inline_table = std::get<ScenarioConfig>(parse_config(
        R"({"spectral_density": {"type": "tabulated", "omega": [0, 1, 2], "values": [0, 2, 0]}, "time": {"horizon": 1}})", "t"));
    CHECK(std::get<Tabulated>(inline_table.spectral).omega == std::vector<double>{0.0, 1.0, 2.0});
    CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("phase-diagram configurations")
{
    const auto ohmic = std::get<PhaseDiagramConfig>(parse_config(R"({
      "kind": "phase_diagram", "family": {"type": "ohmic", "s": 3},
      "eta": {"min": 0.1, "max": 1, "count": 10}, "omega_c": {"min": 1, "max": 10, "count": 4}})", "pd.json"));
    CHECK(ohmic.eta.at(9) == doctest::Approx(1.0));
    CHECK(ohmic.second.at(1) == doctest::Approx(4.0));
    CHECK(ohmic.second_axis_name() == "omega_c");
    const auto J = std::get<OhmicFamily>(ohmic.density_at(2, 3));
    CHECK(J.eta == doctest::Approx(0.3));
    CHECK(J.omega_c == doctest::Approx(10.0));
    CHECK(J.s == 3.0);
    const auto tb = std::get<PhaseDiagramConfig>(parse_config(R"({
      "kind": "phase_diagram", "family": {"type": "tight_binding", "xi": 0.25},
      "eta": {"min": 0.1, "max": 1, "count": 2}, "detuning": {"min": -1, "max": 1, "count": 3}})", "pd.json"));
    CHECK(tb.second_axis_name() == "detuning");
    CHECK(std::get<TightBinding>(tb.density_at(0, 0)).omega_c == doctest::Approx(0.0));
    CHECK_THROWS_AS(parse_config(R"({"kind": "phase_diagram", "family": {"type": "ohmic", "s": 1},
      "eta": {"min": 0.1, "max": 1, "count": 1}, "omega_c": {"min": 1, "max": 10, "count": 4}})", "pd.json"), ConfigError);
}

TEST_CASE("built-in presets are listed and all parse")
{
    const auto names = list_presets();
    for (const char* expected : {"fig3a", "fig3b", "fig3c", "fig3d", "fig2-sub", "fig2-ohmic", "fig2-super", "tight-binding"})
        CHECK(std::find(names.begin(), names.end(), expected) != names.end());
    for (const auto& name : names) CHECK_NOTHROW(load_config(preset_path(name)));
    CHECK_THROWS_AS(preset_path("no-such-preset"), ConfigError);
    const auto fig3c = std::get<ScenarioConfig>(load_config(preset_path("fig3c")));
    CHECK(std::get<OhmicFamily>(fig3c.spectral).eta == 0.5);
    CHECK(fig3c.bath.temperature == 2.0);
}

}
