#include "nmqd/greens.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nmqd/kernels.hpp"
#include "nmqd/quadrature.hpp"

namespace nmqd {

namespace {

std::vector<double> two_sided_breaks(double centre, double first, double reach)
{
    std::vector<double> out{centre};
    for (double d = first; d < reach; d *= 3.0) {
        out.push_back(centre - d);
        out.push_back(centre + d);
    }
    return out;
}

// Breakpoints for integrands over the support that peak at the dressed resonance and may have
// power-law behaviour at the edges.
std::vector<double> density_breaks(const SpectralDensity& J, const SystemParams& sys, double lo, double hi)
{
    const double width = hi - lo;
    std::vector<double> breaks;
    for (double x : quad::geometric_breaks(lo, 1e-12 * width, 0.5 * width)) breaks.push_back(x);
    if (std::isfinite(support(J).hi))
        for (double d = 1e-12 * width; d < 0.5 * width; d *= 10.0) breaks.push_back(hi - d);
    if (const auto* tab = std::get_if<Tabulated>(&J))
        breaks.insert(breaks.end(), tab->omega.begin(), tab->omega.end());
    if (support(J).contains(sys.omega_s)) {
        double resonance = sys.omega_s;
        for (int it = 0; it < 3; ++it) {
            if (!(resonance > lo && resonance < hi)) break;
            resonance = sys.omega_s + principal_self_energy(J, resonance);
        }
        if (resonance > lo && resonance < hi) {
            const double gamma = std::max(0.5 * evaluate(J, resonance), 1e-9 * width);
            for (double x : two_sided_breaks(resonance, 0.1 * gamma, width)) breaks.push_back(x);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    return breaks;
}

} // namespace

TimeGrid TimeGrid::covering(double duration, double dt, double t0)
{
    if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
    if (!(duration >= 0.0)) throw InvalidArgument("time horizon must be non-negative");
    const double steps = std::ceil(duration / dt - 1e-9);
    return {t0, dt, static_cast<std::size_t>(std::max(1.0, steps))};
}

void TimeGrid::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time grid: dt must be > 0");
    if (n_steps < 1) throw InvalidArgument("time grid: n_steps must be >= 1");
    if (!std::isfinite(t0)) throw InvalidArgument("time grid: t0 must be finite");
}

double default_time_step(const SpectralDensity& J, const SystemParams& sys)
{
    double omega_max = 0.0;
    if (const auto* o = std::get_if<OhmicFamily>(&J)) omega_max = o->omega_c;
    else omega_max = std::abs(support(J).hi);
    omega_max = std::max(omega_max, std::abs(sys.omega_s));
    return std::min(0.01 / sys.omega_s, 0.1 / omega_max);
}

PropagatorTrace solve_u_with_kernel(const std::function<Complex(double)>& kernel, double omega_s,
                                    const TimeGrid& grid)
{
    grid.validate();
    const std::size_t n = grid.n_steps;
    const double dt = grid.dt;
    const auto& rule = quad::gauss_legendre6();

    // Moments of the kernel on each lag panel [k dt, (k+1) dt] against 1 and (tau - k dt).
    std::vector<Complex> m0(n), m1(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex s0 = 0.0, s1 = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double sigma = dt * rule.nodes[q];
            const Complex g = kernel(dt * static_cast<double>(k) + sigma);
            s0 += rule.weights[q] * g;
            s1 += rule.weights[q] * sigma * g;
        }
        m0[k] = dt * s0;
        m1[k] = dt * s1;
    }
    // Product-integration weights for u piecewise linear: lag m couples with A_m + B_m.
    auto a_weight = [&](std::size_t k) { return m0[k] - m1[k] / dt; };
    auto b_weight = [&](std::size_t k) { return m1[k - 1] / dt; };
    const Complex a0 = a_weight(0);

    // Reversed split storage so the memory sum runs over contiguous memory.
    std::vector<double> w_re(n + 1, 0.0), w_im(n + 1, 0.0);
    for (std::size_t m = 1; m < n; ++m) {
        const Complex w = a_weight(m) + b_weight(m);
        w_re[n - m] = w.real();
        w_im[n - m] = w.imag();
    }
    std::vector<double> u_re(n + 1, 0.0), u_im(n + 1, 0.0);
    u_re[0] = 1.0;

    const Complex denom = 1.0 + 0.5 * dt * (Complex(0.0, omega_s) + a0);
    Complex f_prev(0.0, -omega_s);
    Complex u_prev(1.0, 0.0);
    for (std::size_t N = 1; N <= n; ++N) {
        double acc_re = 0.0, acc_im = 0.0;
        const double* wr = w_re.data() + (n - N);
        const double* wi = w_im.data() + (n - N);
#pragma omp simd reduction(+ : acc_re, acc_im)
        for (std::size_t j = 1; j < N; ++j) {
            acc_re += wr[j] * u_re[j] - wi[j] * u_im[j];
            acc_im += wr[j] * u_im[j] + wi[j] * u_re[j];
        }
        const Complex known = b_weight(N) + Complex(acc_re, acc_im);
        const Complex u_new = (u_prev + 0.5 * dt * f_prev - 0.5 * dt * known) / denom;
        if (!(std::abs(u_new) <= 1.0 + instability_threshold))
            throw InstabilityError("propagator magnitude reached " + std::to_string(std::abs(u_new)) +
                                   " at t = " + std::to_string(grid.time(N)) +
                                   "; reduce the time step dt (currently " + std::to_string(dt) + ")");
        f_prev = Complex(0.0, -omega_s) * u_new - known - a0 * u_new;
        u_prev = u_new;
        u_re[N] = u_new.real();
        u_im[N] = u_new.imag();
    }
    PropagatorTrace out{grid, std::vector<Complex>(n + 1), omega_s};
    for (std::size_t i = 0; i <= n; ++i) out.u[i] = {u_re[i], u_im[i]};
    return out;
}

PropagatorTrace solve_u(const SpectralDensity& J, const SystemParams& sys, const TimeGrid& grid)
{
    validate(J);
    validate(sys);
    grid.validate();
    if (is_empty(J)) {
        PropagatorTrace out{grid, std::vector<Complex>(grid.size()), sys.omega_s};
        for (std::size_t i = 0; i < grid.size(); ++i)
            out.u[i] = std::polar(1.0, -sys.omega_s * grid.dt * static_cast<double>(i));
        return out;
    }
    if (std::holds_alternative<Tabulated>(J)) {
        const SpectralTransform transform = memory_transform(J);
        return solve_u_with_kernel([&](double tau) { return transform(tau); }, sys.omega_s, grid);
    }
    return solve_u_with_kernel([&](double tau) { return memory_kernel(J, tau); }, sys.omega_s, grid);
}

CorrelationTrace solve_v(const std::vector<Complex>& noise_samples, const PropagatorTrace& u)
{
    const std::size_t size = u.u.size();
    if (size != u.grid.size() || noise_samples.size() != size)
        throw InvalidArgument("solve_v: grid mismatch between propagator (" + std::to_string(size) +
                              " points) and noise kernel (" + std::to_string(noise_samples.size()) +
                              " samples)");
    const std::size_t n = size - 1;
    const double dt = u.grid.dt;
    // Weighted values x_a = c_a u_a with c_0 = 1/2 and the reversed kernel, split for the hot loop.
    std::vector<double> x_re(size), x_im(size), g_re(size), g_im(size);
    for (std::size_t a = 0; a < size; ++a) {
        const double c = a == 0 ? 0.5 : 1.0;
        x_re[a] = c * u.u[a].real();
        x_im[a] = c * u.u[a].imag();
        g_re[n - a] = noise_samples[a].real();
        g_im[n - a] = noise_samples[a].imag();
    }
    const double g0 = noise_samples[0].real();
    CorrelationTrace out{u.grid, std::vector<double>(size, 0.0)};
    // Running full-weight quadratic form over indices 0..N-1.
    double running = 0.25 * std::norm(u.u[0]) * g0;
    for (std::size_t N = 1; N <= n; ++N) {
        double p_re = 0.0, p_im = 0.0;
        const double* gr = g_re.data() + (n - N);
        const double* gi = g_im.data() + (n - N);
#pragma omp simd reduction(+ : p_re, p_im)
        for (std::size_t a = 0; a < N; ++a) {
            p_re += x_re[a] * gr[a] - x_im[a] * gi[a];
            p_im += x_re[a] * gi[a] + x_im[a] * gr[a];
        }
        const Complex uN = u.u[N];
        const double cross = (std::conj(uN) * Complex(p_re, p_im)).real();
        const double diag = std::norm(uN) * g0;
        out.v[N] = dt * dt * (running + cross + 0.25 * diag);
        running += 2.0 * cross + diag;
    }
    return out;
}

CorrelationTrace solve_v(const SpectralDensity& J, const SystemParams& sys, const BathParams& bath,
                         const PropagatorTrace& u)
{
    validate(J);
    validate(sys);
    validate(bath, J, sys.statistics);
    const SpectralTransform transform = noise_transform(J, bath, sys.statistics);
    return solve_v(sample_kernel(transform, u.grid.dt, u.u.size()), u);
}

Complex asymptotic_u(const std::vector<LocalizedMode>& modes, double t, double t0)
{
    Complex sum(0.0, 0.0);
    for (const auto& m : modes) sum += m.amplitude * std::polar(1.0, -m.omega_b * (t - t0));
    return sum;
}

double principal_self_energy(const SpectralDensity& J, double epsilon)
{
    const Support sup = support(J);
    if (!sup.contains(epsilon))
        throw InvalidArgument("principal_self_energy: frequency " + std::to_string(epsilon) +
                              " is outside the spectral support");
    if (is_empty(J)) return 0.0;
    if (const auto* tb = std::get_if<TightBinding>(&J)) return 0.5 * tb->eta * tb->eta * (epsilon - tb->omega_c);
    if (const auto* tab = std::get_if<Tabulated>(&J))
        return piecewise_linear_hilbert(tab->omega, tab->values, epsilon, false).delta;
    // Subtract the singularity: int [J(w) - J(e)]/(e - w) + J(e) log|(e - lo)/(hi - e)|.
    const double lo = sup.lo;
    const double hi = integration_cutoff(J);
    const double je = evaluate(J, epsilon);
    auto breaks = quad::geometric_breaks(lo, 1e-12 * (hi - lo), hi - lo, 10.0);
    for (double x : two_sided_breaks(epsilon, 1e-3 * std::max(epsilon - lo, 1e-12), hi - lo))
        breaks.push_back(x);
    std::sort(breaks.begin(), breaks.end());
    const auto r = quad::integrate(
        [&](double w) {
            if (w == epsilon) return 0.0;
            return (evaluate(J, w) - je) / (epsilon - w);
        },
        lo, hi, breaks, {1e-11, 1e-300, 4000});
    const double log_term = (epsilon > lo && epsilon < hi) ? std::log((epsilon - lo) / (hi - epsilon)) : 0.0;
    return (r.value + je * log_term) / two_pi;
}

double density_of_states(const SpectralDensity& J, const SystemParams& sys, double epsilon)
{
    const Support sup = support(J);
    if (!sup.contains(epsilon))
        throw InvalidArgument("density_of_states: frequency " + std::to_string(epsilon) +
                              " is outside the spectral support");
    const double j = evaluate(J, epsilon);
    if (j == 0.0) return 0.0;
    const double detuning = epsilon - sys.omega_s - principal_self_energy(J, epsilon);
    return j / two_pi / (detuning * detuning + 0.25 * j * j);
}

double continuum_weight(const SpectralDensity& J, const SystemParams& sys)
{
    validate(J);
    validate(sys);
    if (is_empty(J)) return 0.0;
    const double lo = support(J).lo;
    const double hi = integration_cutoff(J);
    const auto breaks = density_breaks(J, sys, lo, hi);
    return quad::integrate([&](double e) { return density_of_states(J, sys, e); }, lo, hi, breaks,
                           {1e-10, 1e-14, 4000})
        .value;
}

SteadyV steady_v(const SpectralDensity& J, const SystemParams& sys, const BathParams& bath)
{
    validate(J);
    validate(sys);
    validate(bath, J, sys.statistics);
    SteadyV out;
    out.continuum_only = !localized_modes(J, sys).empty();
    if (is_empty(J)) return out;
    if (sys.statistics == Statistics::Boson && bath.temperature == 0.0) return out;
    const double lo = support(J).lo;
    double hi = integration_cutoff(J);
    if (bath.temperature > 0.0) hi = std::min(hi, std::max(lo, bath.mu) + 40.0 * bath.temperature);
    else if (sys.statistics == Statistics::Fermion) hi = std::min(hi, bath.mu);
    if (!(hi > lo)) return out;
    auto breaks = density_breaks(J, sys, lo, hi);
    if (sys.statistics == Statistics::Fermion) breaks.push_back(bath.mu);
    std::sort(breaks.begin(), breaks.end());
    const bool step = sys.statistics == Statistics::Fermion && bath.temperature == 0.0;
    out.value = quad::integrate(
                    [&](double e) {
                        const double d = density_of_states(J, sys, e);
                        if (d == 0.0) return 0.0;
                        return d * (step ? 1.0 : occupation(e, bath, sys.statistics));
                    },
                    lo, hi, breaks, {1e-9, 1e-14, 4000})
                    .value;
    return out;
}

SteadyAsymptotics steady_asymptotics(const SpectralDensity& J, const SystemParams& sys,
                                     const BathParams& bath)
{
    SteadyAsymptotics out;
    out.modes = localized_modes(J, sys);
    out.v_infinity = steady_v(J, sys, bath).value;
    out.is_oscillatory = out.modes.size() >= 2;
    return out;
}

std::optional<double> steady_time(const PropagatorTrace& u, double window, double tolerance)
{
    const std::size_t size = u.u.size();
    const auto w = static_cast<std::size_t>(std::max(1.0, std::round(window / u.grid.dt)));
    if (size < 2 * w + 1) return std::nullopt;
    std::vector<double> prefix(size + 1, 0.0);
    for (std::size_t i = 0; i < size; ++i) prefix[i + 1] = prefix[i] + std::norm(u.u[i]);
    // rms(k) covers samples (k - w, k].
    auto rms = [&](std::size_t k) { return std::sqrt((prefix[k + 1] - prefix[k + 1 - w]) / static_cast<double>(w)); };
    std::size_t last_violation = 0;
    bool violated = false;
    for (std::size_t k = 2 * w; k < size; ++k) {
        if (std::abs(rms(k) - rms(k - w)) >= tolerance) {
            last_violation = k;
            violated = true;
        }
    }
    if (!violated) return u.grid.time(2 * w);
    if (last_violation + 1 >= size) return std::nullopt;
    return u.grid.time(last_violation + 1);
}

} // namespace nmqd
