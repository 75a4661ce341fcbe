#include "nmqd/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nmqd {

namespace {

constexpr double imaginary_tolerance = 1e-10;
constexpr double rescale_threshold = 1e150;

// Laguerre values L_j^(k)(x) for j = 0..count-1, each stored as mantissa * exp(log_scale[j]).
void laguerre_column(int k, double x, std::size_t count, std::vector<double>& mantissa,
                     std::vector<double>& log_scale)
{
    mantissa.assign(count, 0.0);
    log_scale.assign(count, 0.0);
    if (count == 0) return;
    double prev = 0.0, cur = 1.0, offset = 0.0;
    mantissa[0] = 1.0;
    for (std::size_t j = 1; j < count; ++j) {
        const double jd = static_cast<double>(j - 1);
        const double next = j == 1 ? 1.0 + k - x : ((2.0 * jd + 1.0 + k - x) * cur - (jd + k) * prev) / (jd + 1.0);
        prev = cur;
        cur = next;
        if (std::abs(cur) > rescale_threshold) {
            const double shift = std::log(std::abs(cur));
            cur /= std::abs(cur);
            prev *= std::exp(-shift);
            offset += shift;
        }
        mantissa[j] = cur;
        log_scale[j] = offset;
    }
}

// W = (1/pi) sum_mn rho_mn (-1)^m <n| D(beta) |m> with beta = 2 alpha. The displaced Fock elements
// take the Laguerre closed form sqrt(j!/(j+k)!) |beta|^k exp(-|beta|^2/2) L_j^(k)(|beta|^2), evaluated
// with the factorial ratios tabulated once per density matrix.
class WignerEvaluator {
public:
    explicit WignerEvaluator(const FockDensityMatrix& rho) : rho_(rho.rho), dim_(static_cast<std::size_t>(rho.rho.rows()))
    {
        if (rho.statistics != Statistics::Boson)
            throw InvalidArgument("the Wigner function is only defined here for bosonic states");
        log_factorial_.resize(dim_);
        for (std::size_t n = 0; n < dim_; ++n) log_factorial_[n] = std::lgamma(static_cast<double>(n) + 1.0);
        ratio_.resize(dim_ * dim_);
        for (std::size_t k = 0; k < dim_; ++k)
            for (std::size_t j = 0; j + k < dim_; ++j)
                ratio_[k * dim_ + j] = std::exp(0.5 * (log_factorial_[j] - log_factorial_[j + k]));
    }

    Complex operator()(double x, double p)
    {
        const double radius2 = 2.0 * (x * x + p * p);  // |beta|^2
        const double log_radius = radius2 > 0.0 ? 0.5 * std::log(radius2) : 0.0;
        const double angle = std::atan2(p, x);
        Complex sum = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) {
            if (k > 0 && radius2 == 0.0) break;
            const std::size_t count = dim_ - k;
            laguerre_column(static_cast<int>(k), radius2, count, mantissa_, log_scale_);
            const Complex phase = std::polar(1.0, static_cast<double>(k) * angle);
            const double log_envelope = static_cast<double>(k) * log_radius - 0.5 * radius2;
            const bool direct = std::abs(log_envelope) < safe_log_range;
            const double envelope = direct ? std::exp(log_envelope) : 0.0;
            for (std::size_t j = 0; j < count; ++j) {
                if (mantissa_[j] == 0.0) continue;
                double mag;
                if (direct && log_scale_[j] == 0.0) {
                    mag = mantissa_[j] * ratio_[k * dim_ + j] * envelope;
                } else {
                    mag = mantissa_[j] * std::exp(0.5 * (log_factorial_[j] - log_factorial_[j + k]) + log_envelope +
                                                  log_scale_[j]);
                }
                if (j % 2 == 1) mag = -mag;
                const auto lo = static_cast<Eigen::Index>(j), hi = static_cast<Eigen::Index>(j + k);
                sum += mag * rho_(lo, hi) * phase;
                if (k > 0) sum += mag * rho_(hi, lo) * std::conj(phase);
            }
        }
        return sum / pi;
    }

private:
    static constexpr double safe_log_range = 600.0;

    const DensityMatrix& rho_;
    std::size_t dim_;
    std::vector<double> log_factorial_, ratio_, mantissa_, log_scale_;
};

} // namespace

double PhaseSpaceGrid::x(std::size_t i) const
{
    return i + 1 == x_points ? x_max : x_min + dx() * static_cast<double>(i);
}

double PhaseSpaceGrid::p(std::size_t j) const
{
    return j + 1 == p_points ? p_max : p_min + dp() * static_cast<double>(j);
}

void PhaseSpaceGrid::validate() const
{
    if (x_points < 2 || p_points < 2) throw InvalidArgument("phase-space grid needs at least 2 points per axis");
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(p_min) || !std::isfinite(p_max))
        throw InvalidArgument("phase-space grid ranges must be finite");
    if (!(x_max > x_min) || !(p_max > p_min)) throw InvalidArgument("phase-space grid ranges must be increasing");
}

double WignerFrame::min() const { return *std::min_element(values.begin(), values.end()); }

double WignerFrame::max() const { return *std::max_element(values.begin(), values.end()); }

double WignerFrame::integral() const
{
    return std::accumulate(values.begin(), values.end(), 0.0) * grid.dx() * grid.dp();
}

Complex wigner_point(const FockDensityMatrix& rho, double x, double p)
{
    WignerEvaluator evaluate(rho);
    return evaluate(x, p);
}

WignerFrame wigner_transform(const FockDensityMatrix& rho, const PhaseSpaceGrid& grid)
{
    grid.validate();
    WignerEvaluator evaluate(rho);
    WignerFrame frame{grid, std::vector<double>(grid.x_points * grid.p_points), rho.time};
    for (std::size_t j = 0; j < grid.p_points; ++j) {
        for (std::size_t i = 0; i < grid.x_points; ++i) {
            const Complex w = evaluate(grid.x(i), grid.p(j));
            if (std::abs(w.imag()) > imaginary_tolerance)
                throw InvalidArgument("Wigner function has imaginary residue " + std::to_string(w.imag()) +
                                      "; the density matrix is not Hermitian");
            frame.values[j * grid.x_points + i] = w.real();
        }
    }
    return frame;
}

} // namespace nmqd
