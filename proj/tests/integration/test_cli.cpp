// test_cli.cpp: the command-line tool driven as a subprocess.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct Run {
    int status = 0;
    std::string output;
};

Run run(const std::string& args)
{
    const std::string command = std::string(NMQD_CLI_PATH) + " " + args + " 2>&1";
    Run out;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    for (std::size_t n; (n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0;) out.output.append(buffer, n);
    const int status = pclose(pipe);
    out.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("nmqd_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("presets list and show")
{
    const Run list = run("presets list");
    CHECK(list.status == 0);
    CHECK(list.output.find("fig3c") != std::string::npos);
    const Run show = run("presets show fig3a");
    CHECK(show.status == 0);
    CHECK(nlohmann::json::parse(show.output)["name"] == "fig3a");
}

TEST_CASE("simulate prints a one-line classification and writes the run directory")
{
    const fs::path dir = scratch("simulate");
    const Run r = run("simulate fig3c --horizon 20 --parallel 2 --out " + dir.string());
    CHECK(r.status == 0);
    const nlohmann::json line = nlohmann::json::parse(r.output.substr(0, r.output.find('\n')));
    CHECK(line["label"] == "Qumemory");
    CHECK(line["scenario"] == "fig3c");
    CHECK(fs::is_regular_file(dir / "u.csv"));
    const nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["parallel"] == 2);
    CHECK(manifest["effective"]["horizon"].get<double>() >= 20.0);
    CHECK(manifest["command"].get<std::string>().find("simulate") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("wigner-movie renders the requested times")
{
    const fs::path dir = scratch("movie");
    const Run r = run("wigner-movie fig3d --horizon 2 --times 0 1 2 --out " + dir.string());
    CHECK(r.status == 0);
    for (const char* name : {"frame_000_0.pgm", "frame_001_1.pgm", "frame_002_2.pgm", "frame_002_2.json", "manifest.json"})
        CHECK_MESSAGE(fs::is_regular_file(dir / name), name);
    fs::remove_all(dir);
}

TEST_CASE("phase-diagram writes CSV, heatmap and manifest")
{
    const fs::path dir = scratch("phase");
    const fs::path config = fs::temp_directory_path() / "nmqd_cli_phase.json";
    std::ofstream(config) << R"({"kind": "phase_diagram", "name": "tiny", "family": {"type": "ohmic", "s": 1},
      "eta": {"min": 0.05, "max": 0.5, "count": 6}, "omega_c": {"min": 2, "max": 8, "count": 4}})";
    const Run r = run("phase-diagram " + config.string() + " --parallel 3 --out " + dir.string());
    CHECK(r.status == 0);
    const std::string csv = slurp(dir / "phase_diagram.csv");
    CHECK(csv.rfind("eta,omega_c,u_steady\n", 0) == 0);
    CHECK(slurp(dir / "phase_diagram.pgm").rfind("P5\n6 4\n255\n", 0) == 0);
    CHECK(fs::is_regular_file(dir / "manifest.json"));
    fs::remove_all(dir);
    fs::remove(config);
}

TEST_CASE("configuration errors exit with status 2 and a located message")
{
    const fs::path config = fs::temp_directory_path() / "nmqd_cli_bad.json";
    std::ofstream(config) << R"({"spectral_density": {"type": "ohmic", "eta": 0.1, "omega_c": 5, "colour": 1},
      "time": {"horizon": 1}})";
    const Run bad = run("simulate " + config.string() + " --out " + scratch("bad").string());
    CHECK(bad.status == 2);
    CHECK(bad.output.find("spectral_density.colour: unknown key") != std::string::npos);
    CHECK(run("simulate no-such-preset").status == 2);
    CHECK(run("simulate").status != 0);
    fs::remove(config);
}
