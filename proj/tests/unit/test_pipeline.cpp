// test_pipeline.cpp: scenario simulation, run directories, phase diagrams and parallel helpers.
#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>

#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"

#include "nmqd/pipeline.hpp"

using namespace nmqd;

namespace {

ScenarioConfig small_scenario(double eta)
{
    auto config = std::get<ScenarioConfig>(parse_config(R"({
      "name": "small",
      "bath": {"temperature": 1.0},
      "spectral_density": {"type": "ohmic", "eta": 0.1, "omega_c": 5},
      "initial_state": {"type": "cat", "alpha": 1.0, "phase": 0},
      "time": {"horizon": 4, "dt": 0.01},
      "outputs": {"coefficients": true, "trace_stride": 10, "states": [0, 2], "wigner": [0, 4]},
      "wigner_grid": {"x": [-4, 4], "p": [-4, 4], "points": [41, 41]}
    })", "small.json"));
    std::get<OhmicFamily>(config.spectral).eta = eta;
    config.outputs.classification = false;
    return config;
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("parallel_for visits every index once and rethrows failures")
{
    std::vector<std::atomic<int>> hits(100);
    parallel_for(100, 4, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw InvalidArgument("seven"); }), InvalidArgument);
    CHECK_NOTHROW(parallel_for(0, 4, [](std::size_t) {}));
}

TEST_CASE("time index and overrides")
{
    const TimeGrid grid = TimeGrid::covering(1.0, 0.1);
    CHECK(time_index(grid, 0.0) == 0);
    CHECK(time_index(grid, 0.34) == 3);
    CHECK(time_index(grid, 1.0) == 10);
    CHECK_THROWS_AS(time_index(grid, 1.5), InvalidArgument);
    const ScenarioConfig config = with_overrides(small_scenario(0.1), {"x", 1, 0.02, 3.0});
    CHECK(*config.dt == 0.02);
    CHECK(config.horizon == 3.0);
    CHECK(config.source["time"]["horizon"] == 3.0);
    CHECK(config.outputs.wigner_times == std::vector<double>{0.0});
    CHECK(config.source["outputs"]["wigner"].size() == 1);
    CHECK(config.outputs.state_times == std::vector<double>{0.0, 2.0});
}

TEST_CASE("an uncoupled system keeps |u| = 1 and its initial state up to rotation")
{
    const ScenarioResult r = simulate(small_scenario(0.0));
    for (const Complex& u : r.u.u) CHECK(std::abs(u) == doctest::Approx(1.0).epsilon(1e-12));
    for (const double v : r.v.v) CHECK(v == 0.0);
    CHECK(r.modes.empty());
    REQUIRE(r.states.size() == 2);
    CHECK(mean_particle_number(r.states[1]) == doctest::Approx(mean_particle_number(r.states[0])));
}

TEST_CASE("simulation is deterministic and independent of the worker count")
{
    const ScenarioConfig config = small_scenario(0.3);
    const ScenarioResult a = simulate(config, 1);
    const ScenarioResult b = simulate(config, 4);
    CHECK(a.u.u == b.u.u);
    CHECK(a.v.v == b.v.v);
    REQUIRE(a.frames.size() == 2);
    CHECK(a.frames[1].values == b.frames[1].values);
    CHECK(a.frames[0].time == 0.0);
    CHECK(a.frames[1].time == doctest::Approx(4.0));
}

TEST_CASE("the first frame is the Wigner function of the initial state")
{
    const ScenarioConfig config = small_scenario(0.3);
    const ScenarioResult r = simulate(config);
    const InitialState init = build_initial_state(config, r.n_max);
    const WignerFrame expected = wigner_transform(pure_state(init), config.wigner_grid);
    CHECK(r.frames[0].values == expected.values);
}

TEST_CASE("run directories hold every requested output and a complete manifest")
{
    const auto dir = std::filesystem::temp_directory_path() / "nmqd_pipeline_run";
    std::filesystem::remove_all(dir);
    ScenarioConfig config = small_scenario(0.3);
    config.outputs.classification = true;
    config.horizon = 40.0;
    run_scenario(config, {dir, 2, {}, {}});
    std::set<std::string> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) files.insert(entry.path().filename().string());
    for (const char* name : {"u.csv", "v.csv", "coefficients.csv", "classification.json", "manifest.json", "state_000_0.csv",
                             "state_001_2.json", "frame_000_0.pgm", "frame_001_4.csv", "frame_001_4.json"})
        CHECK_MESSAGE(files.count(name) == 1, name);
    const nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["tool"] == "nonmarkov-qdyn");
    CHECK(manifest.contains("version"));
    CHECK(manifest["effective"]["dt"] == 0.01);
    CHECK(manifest["config"]["name"] == "small");
    CHECK(manifest["files"].size() == files.size() - 1);
    for (const auto& f : manifest["files"]) {
        const std::string body = slurp(dir / f["path"].get<std::string>());
        CHECK(f["bytes"] == body.size());
        CHECK(f["fnv1a64"] == hex64(fnv1a64(body)));
    }
    const nlohmann::json summary = nlohmann::json::parse(slurp(dir / "classification.json"));
    CHECK(summary["label"] == "Qumemory");  // eta = 0.3 lies above eta_c = 0.2
    std::filesystem::remove_all(dir);
}

TEST_CASE("identical runs produce byte-identical outputs")
{
    const auto base = std::filesystem::temp_directory_path() / "nmqd_pipeline_repeat";
    std::filesystem::remove_all(base);
    const ScenarioConfig config = small_scenario(0.3);
    run_scenario(config, {base / "a", 1, {}, {}});
    run_scenario(config, {base / "b", 3, {}, {}});
    for (const char* name : {"u.csv", "v.csv", "frame_000_0.pgm", "frame_001_4.csv", "state_001_2.json"})
        CHECK_MESSAGE(slurp(base / "a" / name) == slurp(base / "b" / name), name);
    std::filesystem::remove_all(base);
}

TEST_CASE("sub-Ohmic phase diagram switches on at the critical coupling")
{
    auto config = std::get<PhaseDiagramConfig>(parse_config(R"({
      "kind": "phase_diagram", "family": {"type": "ohmic", "s": 0.5},
      "eta": {"min": 0.05, "max": 1.0, "count": 20}, "omega_c": {"min": 1, "max": 10, "count": 5}})", "pd.json"));
    const PhaseDiagram d = compute_phase_diagram(config, 2);
    CHECK(d.failures == 0);
    for (std::size_t j = 0; j < d.second.size(); ++j) {
        const double eta_c = 1.0 / (d.second[j] * boost::math::tgamma(0.5));
        for (std::size_t i = 0; i < d.eta.size(); ++i) {
            if (d.eta[i] < 0.98 * eta_c) CHECK(d.at(i, j) == 0.0);
            if (d.eta[i] > 1.02 * eta_c) {
                CHECK(d.at(i, j) > 0.0);
                CHECK(d.at(i, j) < 1.0);
            }
        }
    }
    const std::string csv = phase_diagram_csv(config, d);
    CHECK(csv.rfind("eta,omega_c,u_steady\n", 0) == 0);
}

TEST_CASE("invalid scenario inputs surface as library errors")
{
    ScenarioConfig config = small_scenario(0.3);
    config.outputs.state_times = {10.0};
    CHECK_THROWS_AS(simulate(config), InvalidArgument);
}

}
