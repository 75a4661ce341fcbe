#include "nmqd/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nmqd {

namespace {

void append(std::string& out, double value)
{
    out += format_double(value);
}

template <class... Values>
void append_row(std::string& out, double first, Values... rest)
{
    append(out, first);
    ((out += ',', append(out, rest)), ...);
    out += '\n';
}

std::size_t checked_stride(std::size_t stride)
{
    if (stride == 0) throw InvalidArgument("output stride must be positive");
    return stride;
}

// Indices 0, stride, 2 stride, ... plus the final point.
std::vector<std::size_t> strided(std::size_t size, std::size_t stride)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size; i += checked_stride(stride)) out.push_back(i);
    if (size > 0 && out.back() != size - 1) out.push_back(size - 1);
    return out;
}

} // namespace

std::string format_double(double value)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 32> buffer{};
    const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), result.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value)
{
    std::array<char, 17> buffer{};
    const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value, 16);
    std::string digits(buffer.data(), result.ptr);
    return std::string(16 - digits.size(), '0') + digits;
}

std::string propagator_csv(const PropagatorTrace& u, std::size_t stride)
{
    std::string out = "t,Re_u,Im_u,abs_u\n";
    for (const std::size_t i : strided(u.u.size(), stride))
        append_row(out, u.grid.time(i), u.u[i].real(), u.u[i].imag(), std::abs(u.u[i]));
    return out;
}

std::string correlation_csv(const CorrelationTrace& v, std::size_t stride)
{
    std::string out = "t,v\n";
    for (const std::size_t i : strided(v.v.size(), stride)) append_row(out, v.grid.time(i), v.v[i]);
    return out;
}

std::string coefficients_csv(const CoefficientTrace& coeffs, std::size_t stride)
{
    std::string out = "t,omega_prime,gamma,gamma_tilde\n";
    for (const std::size_t i : strided(coeffs.omega_prime.size(), stride))
        append_row(out, coeffs.grid.time(i), coeffs.omega_prime[i], coeffs.gamma[i], coeffs.gamma_tilde[i]);
    return out;
}

std::string density_matrix_csv(const FockDensityMatrix& rho)
{
    std::string out = "m,n,Re,Im\n";
    for (Eigen::Index m = 0; m < rho.rho.rows(); ++m)
        for (Eigen::Index n = 0; n < rho.rho.cols(); ++n) {
            out += std::to_string(m) + ',' + std::to_string(n) + ',';
            append(out, rho.rho(m, n).real());
            out += ',';
            append(out, rho.rho(m, n).imag());
            out += '\n';
        }
    return out;
}

nlohmann::json density_matrix_json(const FockDensityMatrix& rho)
{
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (Eigen::Index m = 0; m < rho.rho.rows(); ++m) {
        nlohmann::json re_row = nlohmann::json::array(), im_row = nlohmann::json::array();
        for (Eigen::Index n = 0; n < rho.rho.cols(); ++n) {
            re_row.push_back(rho.rho(m, n).real());
            im_row.push_back(rho.rho(m, n).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return {{"time", rho.time},
            {"n_max", rho.n_max()},
            {"statistics", std::string(to_string(rho.statistics))},
            {"re", std::move(re)},
            {"im", std::move(im)}};
}

std::string wigner_csv(const WignerFrame& frame)
{
    std::string out = "x,p,W\n";
    for (std::size_t j = 0; j < frame.grid.p_points; ++j)
        for (std::size_t i = 0; i < frame.grid.x_points; ++i)
            append_row(out, frame.grid.x(i), frame.grid.p(j), frame.at(i, j));
    return out;
}

std::string heatmap_pgm(const std::vector<double>& values, std::size_t columns, std::size_t rows, double lo,
                        double hi)
{
    if (values.size() != columns * rows) throw InvalidArgument("heatmap size does not match its dimensions");
    std::string out = "P5\n" + std::to_string(columns) + ' ' + std::to_string(rows) + "\n255\n";
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::size_t r = rows; r-- > 0;)
        for (std::size_t c = 0; c < columns; ++c) {
            const double value = values[r * columns + c];
            const double level = std::isnan(value) ? 0.0 : std::clamp((value - lo) / span, 0.0, 1.0);
            out += static_cast<char>(static_cast<unsigned char>(std::lround(level * 255.0)));
        }
    return out;
}

std::string wigner_pgm(const WignerFrame& frame)
{
    return heatmap_pgm(frame.values, frame.grid.x_points, frame.grid.p_points, frame.min(), frame.max());
}

nlohmann::json wigner_pgm_sidecar(const WignerFrame& frame)
{
    return {{"format", "P5"},
            {"width", frame.grid.x_points},
            {"height", frame.grid.p_points},
            {"scaling", "linear: gray = round(255 * (W - min) / (max - min))"},
            {"min", frame.min()},
            {"max", frame.max()},
            {"x_range", {frame.grid.x_min, frame.grid.x_max}},
            {"p_range", {frame.grid.p_min, frame.grid.p_max}},
            {"orientation", "columns run along x from x_min; the top row is p_max"},
            {"time", frame.time}};
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

OutputCollector::OutputCollector(std::filesystem::path directory) : directory_(std::move(directory))
{
    std::filesystem::create_directories(directory_);
}

void OutputCollector::write(const std::string& name, std::string_view contents)
{
    const std::filesystem::path path = directory_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("failed writing " + path.string());
    files_.push_back({{"path", name}, {"bytes", contents.size()}, {"fnv1a64", hex64(fnv1a64(contents))}});
}

void OutputCollector::write_json(const std::string& name, const nlohmann::json& document)
{
    write(name, document.dump(2) + "\n");
}

nlohmann::json OutputCollector::manifest(nlohmann::json header) const
{
    header["files"] = files_;
    return header;
}

void OutputCollector::write_manifest(const nlohmann::json& header) const
{
    const std::filesystem::path path = directory_ / "manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << manifest(header).dump(2) << '\n';
}

} // namespace nmqd
