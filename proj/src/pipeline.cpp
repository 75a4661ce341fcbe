#include "nmqd/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include <Eigen/Core>
#include <boost/version.hpp>

#ifndef NMQD_VERSION
#define NMQD_VERSION "0.0.0"
#endif

namespace nmqd {

namespace {

constexpr int max_auto_n_max = 400;

std::string pad3(std::size_t index)
{
    std::string digits = std::to_string(index);
    return std::string(digits.size() < 3 ? 3 - digits.size() : 0, '0') + digits;
}

std::string stem(const std::string& prefix, std::size_t index, double time)
{
    return prefix + "_" + pad3(index) + "_" + format_double(time);
}

nlohmann::json manifest_header(const std::string& command, const nlohmann::json& config, double wall_seconds,
                               std::size_t parallel)
{
    return {{"tool", "nonmarkov-qdyn"},
            {"version", NMQD_VERSION},
            {"libraries",
             {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"boost", BOOST_LIB_VERSION}}},
            {"command", command},
            {"config", config},
            {"parallel", parallel},
            {"wall_time_seconds", wall_seconds}};
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

nlohmann::json modes_json(const std::vector<LocalizedMode>& modes)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& m : modes)
        out.push_back({{"omega_b", m.omega_b}, {"amplitude", m.amplitude}, {"near_edge", m.near_edge}});
    return out;
}

TimeGrid scenario_grid(const ScenarioConfig& config)
{
    const double dt = config.dt ? *config.dt : default_time_step(config.spectral, config.system);
    return TimeGrid::covering(config.horizon, dt);
}

std::vector<std::size_t> indices_for(const TimeGrid& grid, const std::vector<double>& times)
{
    std::vector<std::size_t> out;
    for (const double t : times) out.push_back(time_index(grid, t));
    return out;
}

} // namespace

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task)
{
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = count;
                }
            }
        });
    for (auto& thread : pool) thread.join();
    if (failure) std::rethrow_exception(failure);
}

ScenarioConfig with_overrides(ScenarioConfig config, const RunOptions& options)
{
    if (options.dt) {
        if (!(*options.dt > 0.0)) throw ConfigError("--dt must be positive");
        config.dt = *options.dt;
        config.source["time"]["dt"] = *options.dt;
    }
    if (options.horizon) {
        if (!(*options.horizon > 0.0)) throw ConfigError("--horizon must be positive");
        config.horizon = *options.horizon;
        config.source["time"]["horizon"] = *options.horizon;
        // Output times past a shortened horizon are dropped rather than rejected.
        auto clip = [&](std::vector<double>& times, const char* key) {
            std::erase_if(times, [&](double t) { return t > config.horizon; });
            if (config.source.contains("outputs") && config.source["outputs"].contains(key))
                config.source["outputs"][key] = times;
        };
        clip(config.outputs.state_times, "states");
        clip(config.outputs.wigner_times, "wigner");
    }
    return config;
}

std::size_t time_index(const TimeGrid& grid, double t)
{
    const double steps = (t - grid.t0) / grid.dt;
    if (steps < -1e-9 || steps > static_cast<double>(grid.n_steps) + 0.5)
        throw InvalidArgument("requested time " + format_double(t) + " lies outside [" + format_double(grid.t0) +
                              ", " + format_double(grid.horizon()) + "]");
    return static_cast<std::size_t>(std::min<double>(std::llround(std::max(0.0, steps)), grid.n_steps));
}

ScenarioResult simulate(const ScenarioConfig& config, std::size_t parallel)
{
    const TimeGrid grid = scenario_grid(config);
    const std::vector<std::size_t> state_idx = indices_for(grid, config.outputs.state_times);
    const std::vector<std::size_t> frame_idx = indices_for(grid, config.outputs.wigner_times);

    ScenarioResult result;
    result.u = solve_u(config.spectral, config.system, grid);
    result.v = solve_v(config.spectral, config.system, config.bath, result.u);
    result.modes = localized_modes(config.spectral, config.system);
    if (config.outputs.classification) {
        try {
            result.classification =
                classify_steady_state(result.modes, result.u, result.v, config.system, config.bath);
        } catch (const InconclusiveError& e) {
            result.inconclusive_reason = e.what();
        }
    }

    double v_max = 0.0;
    for (const std::size_t i : state_idx) v_max = std::max(v_max, result.v.v[i]);
    for (const std::size_t i : frame_idx) v_max = std::max(v_max, result.v.v[i]);
    // The default n_max rule undersizes the thermal tail once v exceeds about 2, so widen it until
    // every requested state passes the tail check (an explicit n_max is never changed).
    int n_max = effective_n_max(config, v_max);
    for (;;) {
        try {
            const InitialState probe = build_initial_state(config, n_max);
            for (const std::size_t i : state_idx) evolve_state(probe, result.u.u[i], result.v.v[i], n_max);
            for (const std::size_t i : frame_idx) evolve_state(probe, result.u.u[i], result.v.v[i], n_max);
            break;
        } catch (const TruncationError&) {
            if (config.n_max || n_max >= max_auto_n_max) throw;
            n_max = std::min(max_auto_n_max, n_max + n_max / 2);
        }
    }
    result.n_max = n_max;
    const InitialState init = build_initial_state(config, result.n_max);
    auto state_at = [&](std::size_t i) {
        FockDensityMatrix rho = evolve_state(init, result.u.u[i], result.v.v[i], result.n_max);
        rho.time = grid.time(i);
        return rho;
    };
    for (const std::size_t i : state_idx) result.states.push_back(state_at(i));

    result.frames.resize(frame_idx.size());
    parallel_for(frame_idx.size(), parallel, [&](std::size_t k) {
        result.frames[k] = wigner_transform(state_at(frame_idx[k]), config.wigner_grid);
    });
    return result;
}

nlohmann::json classification_json(const ScenarioConfig& config, const ScenarioResult& result)
{
    nlohmann::json out = {{"scenario", config.name}};
    if (result.classification) {
        const auto& ev = result.classification->evidence;
        out["label"] = std::string(to_string(result.classification->label));
        out["n_localized_modes"] = ev.n_localized_modes;
        out["u_asymptote"] = ev.u_asymptote;
        out["u_at_horizon"] = ev.u_at_horizon;
        out["steady_v"] = ev.steady_v;
        out["thermal_occupation"] = ev.thermal_occupation;
        out["thermal_deviation"] = ev.thermal_deviation;
        out["steady_time"] = ev.steady_time ? nlohmann::json(*ev.steady_time) : nlohmann::json(nullptr);
    } else if (config.outputs.classification) {
        out["label"] = "Inconclusive";
        out["reason"] = result.inconclusive_reason;
    }
    out["horizon"] = result.u.grid.horizon();
    return out;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options)
{
    const auto start = std::chrono::steady_clock::now();
    ScenarioResult result = simulate(config, options.parallel);
    OutputCollector out(options.out_dir);
    const std::size_t stride = config.outputs.trace_stride;
    if (config.outputs.traces) {
        out.write("u.csv", propagator_csv(result.u, stride));
        out.write("v.csv", correlation_csv(result.v, stride));
    }
    if (config.outputs.coefficients)
        out.write("coefficients.csv", coefficients_csv(coefficients_from_uv(result.u, result.v), stride));
    for (std::size_t k = 0; k < result.states.size(); ++k) {
        const std::string name = stem("state", k, result.states[k].time);
        out.write(name + ".csv", density_matrix_csv(result.states[k]));
        out.write_json(name + ".json", density_matrix_json(result.states[k]));
    }
    for (std::size_t k = 0; k < result.frames.size(); ++k) {
        const std::string name = stem("frame", k, result.frames[k].time);
        out.write(name + ".csv", wigner_csv(result.frames[k]));
        out.write(name + ".pgm", wigner_pgm(result.frames[k]));
        out.write_json(name + ".json", wigner_pgm_sidecar(result.frames[k]));
    }
    const nlohmann::json summary = classification_json(config, result);
    if (config.outputs.classification) out.write_json("classification.json", summary);

    nlohmann::json header = manifest_header("simulate", config.source, seconds_since(start), options.parallel);
    header["effective"] = {{"dt", result.u.grid.dt},
                           {"horizon", result.u.grid.horizon()},
                           {"steps", result.u.grid.n_steps},
                           {"n_max", result.n_max},
                           {"localized_modes", modes_json(result.modes)}};
    out.write_manifest(header);
    return result;
}

std::vector<WignerFrame> run_wigner_movie(const ScenarioConfig& config, std::vector<double> frame_times,
                                          const RunOptions& options)
{
    if (config.system.statistics != Statistics::Boson)
        throw InvalidArgument("Wigner movies need a bosonic scenario");
    const auto start = std::chrono::steady_clock::now();
    ScenarioConfig movie = config;
    if (!frame_times.empty()) movie.outputs.wigner_times = std::move(frame_times);
    if (movie.outputs.wigner_times.empty()) throw ConfigError("no frame times given (outputs.wigner or --times)");
    movie.outputs.state_times.clear();
    movie.outputs.classification = false;
    ScenarioResult result = simulate(movie, options.parallel);
    OutputCollector out(options.out_dir);
    for (std::size_t k = 0; k < result.frames.size(); ++k) {
        const std::string name = stem("frame", k, result.frames[k].time);
        out.write(name + ".csv", wigner_csv(result.frames[k]));
        out.write(name + ".pgm", wigner_pgm(result.frames[k]));
        out.write_json(name + ".json", wigner_pgm_sidecar(result.frames[k]));
    }
    nlohmann::json header = manifest_header("wigner-movie", movie.source, seconds_since(start), options.parallel);
    header["frame_times"] = movie.outputs.wigner_times;
    header["effective"] = {{"dt", result.u.grid.dt}, {"horizon", result.u.grid.horizon()}, {"n_max", result.n_max}};
    out.write_manifest(header);
    return result.frames;
}

PhaseDiagram compute_phase_diagram(const PhaseDiagramConfig& config, std::size_t parallel)
{
    PhaseDiagram diagram;
    for (std::size_t i = 0; i < config.eta.count; ++i) diagram.eta.push_back(config.eta.at(i));
    for (std::size_t j = 0; j < config.second.count; ++j) diagram.second.push_back(config.second.at(j));
    const std::size_t columns = diagram.eta.size();
    diagram.u_steady.assign(columns * diagram.second.size(), 0.0);
    std::atomic<std::size_t> failures{0};
    parallel_for(diagram.u_steady.size(), parallel, [&](std::size_t cell) {
        const std::size_t i = cell % columns, j = cell / columns;
        try {
            double sum = 0.0;
            for (const auto& mode : localized_modes(config.density_at(i, j), config.system)) sum += mode.amplitude;
            diagram.u_steady[cell] = sum;
        } catch (const RootFindingError&) {
            diagram.u_steady[cell] = std::nan("");
            ++failures;
        } catch (const QuadratureError&) {
            diagram.u_steady[cell] = std::nan("");
            ++failures;
        }
    });
    diagram.failures = failures;
    return diagram;
}

std::string phase_diagram_csv(const PhaseDiagramConfig& config, const PhaseDiagram& diagram)
{
    std::string out = "eta," + config.second_axis_name() + ",u_steady\n";
    for (std::size_t j = 0; j < diagram.second.size(); ++j)
        for (std::size_t i = 0; i < diagram.eta.size(); ++i)
            out += format_double(diagram.eta[i]) + ',' + format_double(diagram.second[j]) + ',' +
                   format_double(diagram.at(i, j)) + '\n';
    return out;
}

PhaseDiagram run_phase_diagram(const PhaseDiagramConfig& config, const RunOptions& options)
{
    const auto start = std::chrono::steady_clock::now();
    PhaseDiagram diagram = compute_phase_diagram(config, options.parallel);
    if (diagram.failures > 0)
        std::fprintf(stderr, "warning: %zu grid points failed and are recorded as NaN\n", diagram.failures);
    OutputCollector out(options.out_dir);
    out.write("phase_diagram.csv", phase_diagram_csv(config, diagram));
    if (config.heatmap) {
        out.write("phase_diagram.pgm",
                  heatmap_pgm(diagram.u_steady, diagram.eta.size(), diagram.second.size(), 0.0, 1.0));
        out.write_json("phase_diagram.json",
                       {{"format", "P5"},
                        {"width", diagram.eta.size()},
                        {"height", diagram.second.size()},
                        {"scaling", "linear: gray = round(255 * u_steady); NaN cells are 0"},
                        {"min", 0.0},
                        {"max", 1.0},
                        {"columns", "eta from min to max"},
                        {"rows", config.second_axis_name() + " with the top row at max"}});
    }
    nlohmann::json header = manifest_header("phase-diagram", config.source, seconds_since(start), options.parallel);
    header["failures"] = diagram.failures;
    header["notes"] = {"u_steady is the exact long-time amplitude sum of localized-mode weights, "
                       "not a finite-time snapshot of |u(t)|"};
    out.write_manifest(header);
    return diagram;
}

} // namespace nmqd
