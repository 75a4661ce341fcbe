// io.hpp: locale-independent CSV/JSON/PGM serialization and the run-directory file collector.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "nmqd/master.hpp"
#include "nmqd/wigner.hpp"

namespace nmqd {

// Shortest decimal that round-trips to the same double ("nan", "inf", "-inf" otherwise).
std::string format_double(double value);
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

std::string propagator_csv(const PropagatorTrace& u, std::size_t stride = 1);
std::string correlation_csv(const CorrelationTrace& v, std::size_t stride = 1);
std::string coefficients_csv(const CoefficientTrace& coeffs, std::size_t stride = 1);
std::string density_matrix_csv(const FockDensityMatrix& rho);
nlohmann::json density_matrix_json(const FockDensityMatrix& rho);
std::string wigner_csv(const WignerFrame& frame);

// Binary PGM (P5, 8-bit) of a row-major field; the first image row is the last data row so that
// the vertical axis increases upward. Values map linearly from [lo, hi] onto 0..255; NaN maps to 0.
std::string heatmap_pgm(const std::vector<double>& values, std::size_t columns, std::size_t rows,
                        double lo, double hi);
std::string wigner_pgm(const WignerFrame& frame);
// Sidecar describing how a Wigner PGM was scaled.
nlohmann::json wigner_pgm_sidecar(const WignerFrame& frame);

std::string read_text_file(const std::filesystem::path& path);

// Writes files into one run directory and records each in the manifest with size and checksum.
class OutputCollector {
public:
    explicit OutputCollector(std::filesystem::path directory);

    const std::filesystem::path& directory() const { return directory_; }
    void write(const std::string& name, std::string_view contents);
    void write_json(const std::string& name, const nlohmann::json& document);
    // Manifest body: {"files": [{"path", "bytes", "fnv1a64"}...]} merged into `header`.
    nlohmann::json manifest(nlohmann::json header) const;
    // Writes manifest.json (not listed in itself).
    void write_manifest(const nlohmann::json& header) const;

private:
    std::filesystem::path directory_;
    nlohmann::json files_ = nlohmann::json::array();
};

} // namespace nmqd
