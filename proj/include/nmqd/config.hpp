// config.hpp: JSON scenario and phase-diagram configurations, presets and their validation.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "nmqd/fock.hpp"
#include "nmqd/wigner.hpp"

namespace nmqd {

struct CatSpec {
    Complex alpha0{1.0, 0.0};
    double relative_phase = 0.0;
};

struct FockSpec {
    std::vector<Complex> coefficients;
};

using InitialStateSpec = std::variant<CatSpec, FockSpec>;

struct OutputRequest {
    bool traces = true;
    bool coefficients = false;
    bool classification = true;
    std::size_t trace_stride = 1;
    std::vector<double> state_times;
    std::vector<double> wigner_times;
};

struct ScenarioConfig {
    std::string name = "scenario";
    SystemParams system;
    BathParams bath;
    SpectralDensity spectral = OhmicFamily{};
    InitialStateSpec initial_state = CatSpec{};
    std::optional<int> n_max;
    double horizon = 50.0;
    std::optional<double> dt;  // default_time_step when absent
    OutputRequest outputs;
    PhaseSpaceGrid wigner_grid;
    nlohmann::json source;  // the document as read, echoed into manifests
};

struct AxisRange {
    double min = 0.0;
    double max = 1.0;
    std::size_t count = 2;

    double at(std::size_t i) const;
};

// Ohmic family with exponent s over (eta, omega_c), or tight binding with hopping xi over
// (eta, detuning omega_c - omega_s).
struct PhaseDiagramConfig {
    std::string name = "phase-diagram";
    SystemParams system;
    std::variant<OhmicFamily, TightBinding> family = OhmicFamily{};
    AxisRange eta;
    AxisRange second;
    bool heatmap = true;
    nlohmann::json source;

    // Density at grid point (i along eta, j along the second axis).
    SpectralDensity density_at(std::size_t i, std::size_t j) const;
    std::string second_axis_name() const;
};

using Config = std::variant<ScenarioConfig, PhaseDiagramConfig>;

// `origin` names the document in diagnostics and anchors relative paths (tabulated CSV files).
Config parse_config(const std::string& text, const std::string& origin,
                    const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

InitialState build_initial_state(const ScenarioConfig& config, int n_max);
// Configured n_max, or the defaults (30 or the cat rule for bosons, 1 for fermions) widened by v_max.
int effective_n_max(const ScenarioConfig& config, double v_max);

std::filesystem::path preset_directory();
std::vector<std::string> list_presets();
std::filesystem::path preset_path(const std::string& name);

} // namespace nmqd
