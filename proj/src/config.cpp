#include "nmqd/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "nmqd/io.hpp"

#ifndef NMQD_PRESET_DIR
#define NMQD_PRESET_DIR "presets"
#endif

namespace nmqd {

namespace {

using nlohmann::json;

// One JSON object under validation; `path` is its dotted location for diagnostics.
class Node {
public:
    Node(const json& value, std::string path, const std::string& origin)
        : value_(value), path_(std::move(path)), origin_(origin)
    {
        if (!value_.is_object()) fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& message, const std::string& key = {}) const
    {
        const std::string where = key.empty() ? (path_.empty() ? "<root>" : path_) : child_path(key);
        throw ConfigError(origin_ + ": " + where + ": " + message);
    }

    void allow_only(std::initializer_list<const char*> keys) const
    {
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& item : value_.items())
            if (!allowed.count(item.key())) fail("unknown key", item.key());
    }

    bool has(const std::string& key) const { return value_.contains(key); }

    Node object(const std::string& key) const
    {
        if (!has(key)) fail("missing required object", key);
        return Node(value_.at(key), child_path(key), origin_);
    }

    double number(const std::string& key) const
    {
        if (!has(key)) fail("missing required number", key);
        return as_number(value_.at(key), key);
    }

    double number(const std::string& key, double fallback) const
    {
        return has(key) ? as_number(value_.at(key), key) : fallback;
    }

    std::size_t count(const std::string& key) const
    {
        const double x = number(key);
        if (x < 0.0 || x != std::floor(x) || x > 1e9) fail("expected a non-negative integer", key);
        return static_cast<std::size_t>(x);
    }

    bool boolean(const std::string& key, bool fallback) const
    {
        if (!has(key)) return fallback;
        if (!value_.at(key).is_boolean()) fail("expected true or false", key);
        return value_.at(key).get<bool>();
    }

    std::string string(const std::string& key) const
    {
        if (!has(key)) fail("missing required string", key);
        if (!value_.at(key).is_string()) fail("expected a string", key);
        return value_.at(key).get<std::string>();
    }

    std::string string(const std::string& key, const std::string& fallback) const
    {
        return has(key) ? string(key) : fallback;
    }

    std::vector<double> numbers(const std::string& key) const
    {
        if (!has(key)) return {};
        const json& list = value_.at(key);
        if (!list.is_array()) fail("expected an array of numbers", key);
        std::vector<double> out;
        for (std::size_t i = 0; i < list.size(); ++i)
            out.push_back(as_number(list[i], key + "[" + std::to_string(i) + "]"));
        return out;
    }

    // A complex number written as a number or as [re, im].
    Complex complex(const json& item, const std::string& key) const
    {
        if (item.is_number()) return {as_number(item, key), 0.0};
        if (item.is_array() && item.size() == 2)
            return {as_number(item[0], key + "[0]"), as_number(item[1], key + "[1]")};
        fail("expected a number or a [re, im] pair", key);
    }

    const json& raw(const std::string& key) const { return value_.at(key); }

    std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    double as_number(const json& item, const std::string& key) const
    {
        if (!item.is_number()) fail("expected a number", key);
        const double x = item.get<double>();
        if (!std::isfinite(x)) fail("expected a finite number", key);
        return x;
    }

    const json& value_;
    std::string path_;
    const std::string& origin_;
};

// Re-raises a component validation failure with the config location attached.
template <class F>
void checked(const Node& node, const std::string& key, F&& check)
{
    try {
        check();
    } catch (const InvalidArgument& e) {
        node.fail(e.what(), key);
    }
}

SystemParams parse_system(const Node& root)
{
    SystemParams sys;
    if (!root.has("system")) return sys;
    const Node node = root.object("system");
    node.allow_only({"omega_s", "statistics"});
    sys.omega_s = node.number("omega_s", sys.omega_s);
    checked(node, "statistics", [&] { sys.statistics = statistics_from_string(node.string("statistics", "boson")); });
    checked(node, "omega_s", [&] { validate(sys); });
    return sys;
}

Tabulated parse_table(const Node& node, const std::filesystem::path& base_dir)
{
    if (node.has("csv")) {
        if (node.has("omega") || node.has("values")) node.fail("give either csv or omega/values, not both");
        std::filesystem::path path = node.string("csv");
        if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
        try {
            return Tabulated::from_csv(path);
        } catch (const Error& e) {
            node.fail(e.what(), "csv");
        }
    }
    return {node.numbers("omega"), node.numbers("values")};
}

SpectralDensity parse_spectral(const Node& node, const std::filesystem::path& base_dir)
{
    const std::string type = node.string("type");
    SpectralDensity J;
    if (type == "ohmic") {
        node.allow_only({"type", "eta", "s", "omega_c"});
        J = OhmicFamily{node.number("eta"), node.number("s", 1.0), node.number("omega_c")};
    } else if (type == "tight_binding") {
        node.allow_only({"type", "eta", "xi", "omega_c"});
        J = TightBinding{node.number("eta"), node.number("xi"), node.number("omega_c")};
    } else if (type == "tabulated") {
        node.allow_only({"type", "csv", "omega", "values"});
        J = parse_table(node, base_dir);
    } else {
        node.fail("unknown spectral density type '" + type + "' (ohmic, tight_binding, tabulated)", "type");
    }
    checked(node, "", [&] { validate(J); });
    return J;
}

InitialStateSpec parse_initial_state(const Node& node)
{
    const std::string type = node.string("type");
    if (type == "cat") {
        node.allow_only({"type", "alpha", "phase"});
        CatSpec cat;
        if (node.has("alpha")) cat.alpha0 = node.complex(node.raw("alpha"), "alpha");
        cat.relative_phase = node.number("phase", 0.0);
        return cat;
    }
    if (type == "fock") {
        node.allow_only({"type", "coefficients"});
        if (!node.has("coefficients") || !node.raw("coefficients").is_array())
            node.fail("expected an array of amplitudes", "coefficients");
        FockSpec spec;
        const json& list = node.raw("coefficients");
        for (std::size_t i = 0; i < list.size(); ++i)
            spec.coefficients.push_back(node.complex(list[i], "coefficients[" + std::to_string(i) + "]"));
        return spec;
    }
    node.fail("unknown initial state type '" + type + "' (cat, fock)", "type");
}

std::vector<double> parse_times(const Node& node, const std::string& key)
{
    std::vector<double> times = node.numbers(key);
    for (const double t : times)
        if (t < 0.0) node.fail("times must be >= 0", key);
    return times;
}

PhaseSpaceGrid parse_grid(const Node& node)
{
    node.allow_only({"x", "p", "points"});
    PhaseSpaceGrid grid;
    auto pair = [&](const std::string& key, double& lo, double& hi) {
        if (!node.has(key)) return;
        const std::vector<double> v = node.numbers(key);
        if (v.size() != 2) node.fail("expected [min, max]", key);
        lo = v[0];
        hi = v[1];
    };
    pair("x", grid.x_min, grid.x_max);
    pair("p", grid.p_min, grid.p_max);
    if (node.has("points")) {
        const std::vector<double> v = node.numbers("points");
        if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]) || v[0] < 0 || v[1] < 0)
            node.fail("expected [x_points, p_points]", "points");
        grid.x_points = static_cast<std::size_t>(v[0]);
        grid.p_points = static_cast<std::size_t>(v[1]);
    }
    checked(node, "", [&] { grid.validate(); });
    return grid;
}

ScenarioConfig parse_scenario(const Node& root, const std::filesystem::path& base_dir)
{
    root.allow_only({"kind", "name", "description", "system", "bath", "spectral_density", "initial_state", "n_max",
                     "time", "outputs", "wigner_grid"});
    ScenarioConfig config;
    config.name = root.string("name", config.name);
    config.system = parse_system(root);
    config.spectral = parse_spectral(root.object("spectral_density"), base_dir);
    if (root.has("bath")) {
        const Node bath = root.object("bath");
        bath.allow_only({"temperature", "mu"});
        config.bath.temperature = bath.number("temperature", 0.0);
        config.bath.mu = bath.number("mu", 0.0);
        checked(bath, "", [&] { validate(config.bath, config.spectral, config.system.statistics); });
    }
    if (root.has("initial_state")) config.initial_state = parse_initial_state(root.object("initial_state"));
    if (root.has("n_max")) {
        const std::size_t n = root.count("n_max");
        if (n < 1) root.fail("must be >= 1", "n_max");
        config.n_max = static_cast<int>(n);
    }
    const Node time = root.object("time");
    time.allow_only({"horizon", "dt"});
    config.horizon = time.number("horizon");
    if (!(config.horizon > 0.0)) time.fail("must be positive", "horizon");
    if (time.has("dt")) {
        config.dt = time.number("dt");
        if (!(*config.dt > 0.0)) time.fail("must be positive", "dt");
    }
    if (root.has("outputs")) {
        const Node out = root.object("outputs");
        out.allow_only({"traces", "coefficients", "classification", "trace_stride", "states", "wigner"});
        config.outputs.traces = out.boolean("traces", true);
        config.outputs.coefficients = out.boolean("coefficients", false);
        config.outputs.classification = out.boolean("classification", true);
        if (out.has("trace_stride")) {
            config.outputs.trace_stride = out.count("trace_stride");
            if (config.outputs.trace_stride == 0) out.fail("must be >= 1", "trace_stride");
        }
        config.outputs.state_times = parse_times(out, "states");
        config.outputs.wigner_times = parse_times(out, "wigner");
    }
    if (root.has("wigner_grid")) config.wigner_grid = parse_grid(root.object("wigner_grid"));
    if (config.system.statistics == Statistics::Fermion && !config.outputs.wigner_times.empty())
        root.fail("Wigner frames are only available for bosonic scenarios", "outputs.wigner");
    if (config.system.statistics == Statistics::Fermion && std::holds_alternative<CatSpec>(config.initial_state))
        root.fail("cat states are bosonic; use a fock initial state", "initial_state");
    // Build the initial state once so that normalization errors surface at load time.
    try {
        build_initial_state(config, effective_n_max(config, 0.0));
    } catch (const Error& e) {
        root.fail(e.what(), "initial_state");
    }
    return config;
}

AxisRange parse_axis(const Node& node)
{
    node.allow_only({"min", "max", "count"});
    AxisRange axis{node.number("min"), node.number("max"), node.count("count")};
    if (axis.count < 2) node.fail("must be >= 2", "count");
    if (!(axis.max > axis.min)) node.fail("max must exceed min");
    return axis;
}

PhaseDiagramConfig parse_phase_diagram(const Node& root)
{
    root.allow_only({"kind", "name", "description", "system", "family", "eta", "omega_c", "detuning", "heatmap"});
    PhaseDiagramConfig config;
    config.name = root.string("name", config.name);
    config.system = parse_system(root);
    const Node family = root.object("family");
    const std::string type = family.string("type");
    config.eta = parse_axis(root.object("eta"));
    if (!(config.eta.min > 0.0)) root.fail("grid bounds must be positive", "eta.min");
    if (type == "ohmic") {
        family.allow_only({"type", "s"});
        config.family = OhmicFamily{1.0, family.number("s"), 1.0};
        if (root.has("detuning")) root.fail("the Ohmic diagram is over omega_c", "detuning");
        config.second = parse_axis(root.object("omega_c"));
        if (!(config.second.min > 0.0)) root.fail("grid bounds must be positive", "omega_c.min");
    } else if (type == "tight_binding") {
        family.allow_only({"type", "xi"});
        config.family = TightBinding{1.0, family.number("xi"), config.system.omega_s};
        if (root.has("omega_c")) root.fail("the tight-binding diagram is over the detuning", "omega_c");
        config.second = parse_axis(root.object("detuning"));
    } else {
        family.fail("unknown family '" + type + "' (ohmic, tight_binding)", "type");
    }
    checked(family, "", [&] { std::visit([](const auto& J) { validate(SpectralDensity{J}); }, config.family); });
    config.heatmap = root.boolean("heatmap", true);
    return config;
}

} // namespace

double AxisRange::at(std::size_t i) const
{
    if (i + 1 == count) return max;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

SpectralDensity PhaseDiagramConfig::density_at(std::size_t i, std::size_t j) const
{
    if (const auto* ohmic = std::get_if<OhmicFamily>(&family))
        return OhmicFamily{eta.at(i), ohmic->s, second.at(j)};
    const auto& tb = std::get<TightBinding>(family);
    return TightBinding{eta.at(i), tb.xi, system.omega_s + second.at(j)};
}

std::string PhaseDiagramConfig::second_axis_name() const
{
    return std::holds_alternative<OhmicFamily>(family) ? "omega_c" : "detuning";
}

Config parse_config(const std::string& text, const std::string& origin, const std::filesystem::path& base_dir)
{
    json document;
    try {
        document = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": invalid JSON (" +
                          e.what() + ")");
    }
    const Node root(document, "", origin);
    const std::string kind = root.string("kind", "scenario");
    if (kind == "scenario") {
        ScenarioConfig config = parse_scenario(root, base_dir);
        config.source = document;
        return config;
    }
    if (kind == "phase_diagram") {
        PhaseDiagramConfig config = parse_phase_diagram(root);
        config.source = document;
        return config;
    }
    root.fail("unknown kind '" + kind + "' (scenario, phase_diagram)", "kind");
}

Config load_config(const std::filesystem::path& path)
{
    return parse_config(read_text_file(path), path.string(), path.parent_path());
}

InitialState build_initial_state(const ScenarioConfig& config, int n_max)
{
    if (const auto* cat = std::get_if<CatSpec>(&config.initial_state))
        return cat_state(cat->alpha0, cat->relative_phase, n_max);
    const auto& fock = std::get<FockSpec>(config.initial_state);
    return resized(fock_superposition(fock.coefficients, config.system.statistics), n_max);
}

int effective_n_max(const ScenarioConfig& config, double v_max)
{
    if (config.system.statistics == Statistics::Fermion) return 1;
    if (config.n_max) return *config.n_max;
    Complex alpha0 = 0.0;
    if (const auto* cat = std::get_if<CatSpec>(&config.initial_state)) alpha0 = cat->alpha0;
    int n_max = default_boson_n_max(alpha0, v_max);
    if (const auto* fock = std::get_if<FockSpec>(&config.initial_state))
        n_max = std::max(n_max, static_cast<int>(fock->coefficients.size()) - 1);
    return n_max;
}

std::filesystem::path preset_directory()
{
    if (const char* env = std::getenv("NONMARKOV_QDYN_PRESETS"); env && *env) return env;
    return NMQD_PRESET_DIR;
}

std::vector<std::string> list_presets()
{
    std::vector<std::string> names;
    const std::filesystem::path dir = preset_directory();
    if (!std::filesystem::is_directory(dir)) throw ConfigError("preset directory " + dir.string() + " not found");
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
    std::sort(names.begin(), names.end());
    return names;
}

std::filesystem::path preset_path(const std::string& name)
{
    const std::filesystem::path path = preset_directory() / (name + ".json");
    if (!std::filesystem::is_regular_file(path)) throw ConfigError("unknown preset '" + name + "'");
    return path;
}

} // namespace nmqd
