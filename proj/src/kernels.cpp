#include "nmqd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nmqd {

namespace {

constexpr double grading_ratio = 0.05;
constexpr double series_threshold = 0.2;

// Phi0 = int_0^1 exp(-i theta x) dx and Phi1 = int_0^1 x exp(-i theta x) dx for small theta.
void filon_series(double theta, Complex& phi0, Complex& phi1)
{
    const Complex z(0.0, -theta);
    Complex power(1.0, 0.0);
    double factorial = 1.0;
    phi0 = 0.0;
    phi1 = 0.0;
    for (int k = 0; k <= 10; ++k) {
        if (k > 0) {
            power *= z;
            factorial *= k;
        }
        phi0 += power / (factorial * (k + 1));
        phi1 += power / (factorial * (k + 2));
    }
}

std::vector<double> graded_offsets(double reach, double first, double max_spacing)
{
    std::vector<double> d{0.0};
    double x = first;
    while (x < reach) {
        d.push_back(x);
        x += std::min(max_spacing, std::max(first, grading_ratio * x));
    }
    return d;
}

double spectral_scale(const SpectralDensity& J)
{
    if (const auto* o = std::get_if<OhmicFamily>(&J)) return o->omega_c;
    if (const auto* t = std::get_if<TightBinding>(&J)) return t->xi;
    const auto& tab = std::get<Tabulated>(J);
    return (tab.omega.back() - tab.omega.front()) / 20.0;
}

} // namespace

SpectralTransform::SpectralTransform(std::vector<double> nodes, std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values))
{
    if (nodes_.size() != values_.size())
        throw InvalidArgument("spectral transform: node and value counts differ");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (!(nodes_[i] > nodes_[i - 1]))
            throw InvalidArgument("spectral transform: nodes must be strictly increasing");
}

void SpectralTransform::add_end_cap(double edge, double width, double f_far, double f_half)
{
    if (f_far == 0.0) return;
    double power = 0.0;
    if (f_half != 0.0 && f_far / f_half > 0.0) power = std::log2(f_far / f_half);
    else power = 60.0;
    if (!(power > -1.0) || !std::isfinite(f_far))
        throw QuadratureError("spectral function is not integrable at the support edge " +
                                  std::to_string(edge),
                              std::abs(f_far));
    if (power > 50.0) return;
    caps_.push_back({edge + 0.5 * width, f_far * std::abs(width) / (power + 1.0)});
}

Complex SpectralTransform::operator()(double tau) const
{
    Complex sum(0.0, 0.0);
    const std::size_t n = nodes_.size();
    if (n >= 2) {
        Complex e_prev = std::polar(1.0, -nodes_[0] * tau);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double h = nodes_[i + 1] - nodes_[i];
            const double theta = h * tau;
            const Complex e_next = std::polar(1.0, -nodes_[i + 1] * tau);
            const double fa = values_[i];
            const double df = values_[i + 1] - fa;
            if (std::abs(theta) < series_threshold) {
                Complex phi0, phi1;
                filon_series(theta, phi0, phi1);
                sum += h * e_prev * (fa * phi0 + df * phi1);
            } else {
                const Complex diff = e_prev - e_next;
                const Complex p0 = diff / Complex(0.0, theta);
                const Complex p1 = Complex(0.0, 1.0) * e_next / theta - diff / (theta * theta);
                sum += h * (fa * p0 + df * p1);
            }
            e_prev = e_next;
        }
    }
    for (const auto& cap : caps_) sum += cap.weight * std::polar(1.0, -cap.centre * tau);
    return sum / two_pi;
}

double SpectralTransform::integral() const
{
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
        sum += 0.5 * (nodes_[i + 1] - nodes_[i]) * (values_[i] + values_[i + 1]);
    for (const auto& cap : caps_) sum += cap.weight;
    return sum / two_pi;
}

std::vector<double> frequency_mesh(double lo, double hi, double max_spacing, bool grade_lo,
                                   bool grade_hi, double end_gap, const std::vector<double>& extra)
{
    if (!(hi > lo)) throw InvalidArgument("frequency mesh: empty interval");
    if (!(max_spacing > 0.0)) throw InvalidArgument("frequency mesh: spacing must be positive");
    const double half = 0.5 * (hi - lo);
    std::vector<double> nodes;
    if (grade_lo) {
        for (double d : graded_offsets(half, end_gap, max_spacing))
            if (d > 0.0) nodes.push_back(lo + d);
    } else {
        nodes.push_back(lo);
    }
    if (grade_hi) {
        for (double d : graded_offsets(half, end_gap, max_spacing))
            if (d > 0.0) nodes.push_back(hi - d);
    } else {
        nodes.push_back(hi);
    }
    std::sort(nodes.begin(), nodes.end());
    // Fill the bulk between the graded regions.
    const std::size_t graded_count = nodes.size();
    for (std::size_t i = 0; i + 1 < graded_count; ++i) {
        const double gap = nodes[i + 1] - nodes[i];
        if (gap <= max_spacing) continue;
        const auto panels = static_cast<std::size_t>(std::ceil(gap / max_spacing));
        for (std::size_t k = 1; k < panels; ++k)
            nodes.push_back(nodes[i] + gap * static_cast<double>(k) / static_cast<double>(panels));
    }
    for (double x : extra)
        if (x > lo && x < hi) nodes.push_back(x);
    std::sort(nodes.begin(), nodes.end());
    // Drop near-duplicates so every panel has positive width.
    std::vector<double> out;
    const double merge = 1e-14 * std::max(1.0, std::abs(hi) + std::abs(lo));
    for (double x : nodes)
        if (out.empty() || x - out.back() > merge) out.push_back(x);
    return out;
}

SpectralTransform memory_transform(const SpectralDensity& J)
{
    if (const auto* tab = std::get_if<Tabulated>(&J)) return SpectralTransform(tab->omega, tab->values);
    const Support sup = support(J);
    const double hi = integration_cutoff(J);
    const double scale = spectral_scale(J);
    const bool finite_hi = std::isfinite(sup.hi);
    const double gap = 1e-7 * scale;
    auto nodes = frequency_mesh(sup.lo, hi, 0.01 * scale, true, finite_hi, gap);
    std::vector<double> values(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = evaluate(J, nodes[i]);
    SpectralTransform out(std::move(nodes), std::move(values));
    out.add_end_cap(sup.lo, gap, evaluate(J, sup.lo + gap), evaluate(J, sup.lo + 0.5 * gap));
    if (finite_hi)
        out.add_end_cap(sup.hi, -gap, evaluate(J, sup.hi - gap), evaluate(J, sup.hi - 0.5 * gap));
    return out;
}

SpectralTransform noise_transform(const SpectralDensity& J, const BathParams& bath,
                                  Statistics statistics)
{
    validate(bath, J, statistics);
    if (is_empty(J)) return {};
    const double T = bath.temperature;
    if (statistics == Statistics::Boson && T == 0.0) return {};
    const Support sup = support(J);
    double hi = integration_cutoff(J);
    bool grade_hi = std::isfinite(sup.hi);
    const double thermal_reach = T > 0.0 ? bath.mu + 40.0 * T : bath.mu;
    if (thermal_reach < hi) {
        hi = thermal_reach;
        grade_hi = false;
    }
    if (!(hi > sup.lo)) return {};

    // At T = 0 the fermion weight is exactly one below mu, and the mesh stops at mu.
    auto weight = [&](double w) {
        if (statistics == Statistics::Fermion && T == 0.0) return 1.0;
        return occupation(w, bath, statistics);
    };
    auto integrand = [&](double w) { return evaluate(J, w) * weight(w); };

    const double scale = spectral_scale(J);
    double spacing = 0.01 * scale;
    if (T > 0.0) spacing = std::min(spacing, 0.03 * T);
    const double gap = 1e-7 * std::min(scale, T > 0.0 ? T : scale);

    std::vector<double> extra;
    if (const auto* tab = std::get_if<Tabulated>(&J)) extra = tab->omega;
    if (statistics == Statistics::Fermion) extra.push_back(bath.mu);

    auto nodes = frequency_mesh(sup.lo, hi, spacing, true, grade_hi, gap, extra);
    std::vector<double> values(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = integrand(nodes[i]);
    SpectralTransform out(std::move(nodes), std::move(values));
    out.add_end_cap(sup.lo, gap, integrand(sup.lo + gap), integrand(sup.lo + 0.5 * gap));
    if (grade_hi)
        out.add_end_cap(sup.hi, -gap, integrand(sup.hi - gap), integrand(sup.hi - 0.5 * gap));
    return out;
}

SelfEnergy piecewise_linear_hilbert(const std::vector<double>& nodes,
                                    const std::vector<double>& values, double omega,
                                    bool with_derivative)
{
    // Log terms with a zero argument cancel between neighbouring panels and are skipped.
    auto log_abs = [](double x) { return x == 0.0 ? 0.0 : std::log(std::abs(x)); };
    double delta = 0.0, dprime = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double a = nodes[i], b = nodes[i + 1];
        const double slope = (values[i + 1] - values[i]) / (b - a);
        const double c = values[i] + slope * (omega - a);
        const double log_ratio = log_abs(omega - a) - log_abs(omega - b);
        delta += c * log_ratio - slope * (b - a);
        if (with_derivative)
            dprime += c * (1.0 / (omega - b) - 1.0 / (omega - a)) - slope * log_ratio;
    }
    return {delta / two_pi, -dprime / two_pi};
}

std::vector<Complex> sample_kernel(const SpectralTransform& transform, double dt, std::size_t count)
{
    std::vector<Complex> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = transform(dt * static_cast<double>(k));
    return out;
}

} // namespace nmqd
