// nonmarkov_qdyn.cpp: command-line front end for scenario runs, phase diagrams and Wigner movies.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nmqd/pipeline.hpp"

namespace {

using namespace nmqd;

// A path to an existing file, or else the name of a preset.
std::filesystem::path resolve_config(const std::string& name)
{
    if (std::filesystem::is_regular_file(name)) return name;
    return preset_path(name);
}

ScenarioConfig load_scenario(const std::string& name)
{
    Config config = load_config(resolve_config(name));
    if (auto* scenario = std::get_if<ScenarioConfig>(&config)) return *scenario;
    throw ConfigError(name + ": expected a scenario config (kind = \"scenario\")");
}

PhaseDiagramConfig load_phase_diagram(const std::string& name)
{
    Config config = load_config(resolve_config(name));
    if (auto* diagram = std::get_if<PhaseDiagramConfig>(&config)) return *diagram;
    throw ConfigError(name + ": expected a phase-diagram config (kind = \"phase_diagram\")");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact non-Markovian dynamics of a single mode coupled to a structured reservoir"};
    app.require_subcommand(1);

    RunOptions options;
    std::string config_name;
    std::optional<double> dt, horizon;
    std::vector<double> frame_times;
    std::string preset_name;

    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("config", config_name, "Config file or preset name")->required();
        cmd->add_option("--out", options.out_dir, "Run directory")->capture_default_str();
        cmd->add_option("--parallel", options.parallel, "Worker threads")->check(CLI::PositiveNumber);
    };

    CLI::App* simulate = app.add_subcommand("simulate", "Run a scenario and write traces, states and frames");
    add_run_flags(simulate);
    simulate->add_option("--dt", dt, "Time step override");
    simulate->add_option("--horizon", horizon, "Horizon override");

    CLI::App* phase = app.add_subcommand("phase-diagram", "Sweep the steady |u| over a parameter grid");
    add_run_flags(phase);

    CLI::App* movie = app.add_subcommand("wigner-movie", "Render Wigner frames of a scenario");
    add_run_flags(movie);
    movie->add_option("--dt", dt, "Time step override");
    movie->add_option("--horizon", horizon, "Horizon override");
    movie->add_option("--times", frame_times, "Frame times (default: the config's outputs.wigner)");

    CLI::App* presets = app.add_subcommand("presets", "List or show built-in presets");
    presets->require_subcommand(1);
    CLI::App* list = presets->add_subcommand("list", "List preset names");
    CLI::App* show = presets->add_subcommand("show", "Print a preset");
    show->add_option("name", preset_name, "Preset name")->required();

    CLI11_PARSE(app, argc, argv);
    options.dt = dt;
    options.horizon = horizon;

    try {
        if (list->parsed()) {
            for (const auto& name : list_presets()) std::cout << name << '\n';
        } else if (show->parsed()) {
            std::cout << read_text_file(preset_path(preset_name));
        } else if (simulate->parsed()) {
            const ScenarioConfig config = with_overrides(load_scenario(config_name), options);
            const ScenarioResult result = run_scenario(config, options);
            std::cout << classification_json(config, result).dump() << std::endl;
        } else if (phase->parsed()) {
            const PhaseDiagram diagram = run_phase_diagram(load_phase_diagram(config_name), options);
            std::cout << nlohmann::json{{"cells", diagram.u_steady.size()}, {"failures", diagram.failures}}.dump()
                      << std::endl;
        } else if (movie->parsed()) {
            const ScenarioConfig config = with_overrides(load_scenario(config_name), options);
            const auto frames = run_wigner_movie(config, frame_times, options);
            std::cout << nlohmann::json{{"frames", frames.size()}}.dump() << std::endl;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
