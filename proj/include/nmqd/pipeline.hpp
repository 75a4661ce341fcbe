// pipeline.hpp: scenario runs, phase-diagram sweeps and Wigner movies, with their file outputs.
#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nmqd/config.hpp"
#include "nmqd/io.hpp"

namespace nmqd {

struct RunOptions {
    std::filesystem::path out_dir = "run";
    std::size_t parallel = 1;
    std::optional<double> dt;       // overrides the config
    std::optional<double> horizon;  // overrides the config
};

// Runs task(i) for i in [0, count) on at most `workers` threads; rethrows the first failure.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task);

ScenarioConfig with_overrides(ScenarioConfig config, const RunOptions& options);

struct ScenarioResult {
    PropagatorTrace u;
    CorrelationTrace v;
    std::vector<LocalizedMode> modes;
    int n_max = 0;
    std::optional<SteadyStateClass> classification;
    std::string inconclusive_reason;  // set when classification was requested but inconclusive
    std::vector<FockDensityMatrix> states;
    std::vector<WignerFrame> frames;
};

// Grid index nearest to time t; throws when t lies beyond the horizon.
std::size_t time_index(const TimeGrid& grid, double t);

// Solves u and v, classifies, and builds the requested states and Wigner frames (no file output).
ScenarioResult simulate(const ScenarioConfig& config, std::size_t parallel = 1);

// The one-line classification summary printed by the command-line tool.
nlohmann::json classification_json(const ScenarioConfig& config, const ScenarioResult& result);

// simulate() plus the run directory: traces, coefficients, states, frames, classification, manifest.
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options);

// Frames at `frame_times` (the config's Wigner times when empty), named frame_{index}_{time}.
std::vector<WignerFrame> run_wigner_movie(const ScenarioConfig& config, std::vector<double> frame_times,
                                          const RunOptions& options);

struct PhaseDiagram {
    std::vector<double> eta;
    std::vector<double> second;
    std::vector<double> u_steady;  // u_steady[j * eta.size() + i] at (eta[i], second[j])
    std::size_t failures = 0;      // root-finder failures, stored as NaN

    double at(std::size_t i, std::size_t j) const { return u_steady[j * eta.size() + i]; }
};

// Steady |u| = sum of localized-mode amplitudes at every grid point.
PhaseDiagram compute_phase_diagram(const PhaseDiagramConfig& config, std::size_t parallel = 1);
PhaseDiagram run_phase_diagram(const PhaseDiagramConfig& config, const RunOptions& options);

std::string phase_diagram_csv(const PhaseDiagramConfig& config, const PhaseDiagram& diagram);

} // namespace nmqd
