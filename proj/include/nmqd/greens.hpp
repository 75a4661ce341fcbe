// greens.hpp: propagator u(t,t0) and correlation v(t,t) of the open mode, plus steady-state tools.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nmqd/spectral.hpp"

namespace nmqd {

struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.01;
    std::size_t n_steps = 1;

    std::size_t size() const { return n_steps + 1; }
    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double horizon() const { return time(n_steps); }
    // Grid covering [t0, t0 + duration] with the last point at or past the end.
    static TimeGrid covering(double duration, double dt, double t0 = 0.0);
    void validate() const;
    bool operator==(const TimeGrid&) const = default;
};

struct PropagatorTrace {
    TimeGrid grid;
    std::vector<Complex> u;
    double omega_s = 1.0;  // bare frequency the trace was solved for
};

struct CorrelationTrace {
    TimeGrid grid;
    std::vector<double> v;
};

struct SteadyAsymptotics {
    std::vector<LocalizedMode> modes;
    double v_infinity = 0.0;
    bool is_oscillatory = false;
};

inline constexpr double instability_threshold = 1e-3;

// Default step min(0.01, 0.1/omega_max) in units of 1/omega_s, omega_max being the band top
// (omega_c for the Ohmic family).
double default_time_step(const SpectralDensity& J, const SystemParams& sys);

// du/dt = -i omega_s u - int_{t0}^{t} g(t - tau) u(tau) dtau with u(t0) = 1.
PropagatorTrace solve_u(const SpectralDensity& J, const SystemParams& sys, const TimeGrid& grid);
// Same equation for an arbitrary kernel callable on tau >= 0.
PropagatorTrace solve_u_with_kernel(const std::function<Complex(double)>& kernel, double omega_s,
                                    const TimeGrid& grid);

// Equal-time v(t,t) as a trapezoidal double integral of u * noise kernel * conj(u).
CorrelationTrace solve_v(const SpectralDensity& J, const SystemParams& sys, const BathParams& bath,
                         const PropagatorTrace& u);
// Variant taking the noise kernel sampled at the grid lags 0, dt, 2dt, ...
CorrelationTrace solve_v(const std::vector<Complex>& noise_samples, const PropagatorTrace& u);

Complex asymptotic_u(const std::vector<LocalizedMode>& modes, double t, double t0 = 0.0);

// Principal-value level shift inside the support.
double principal_self_energy(const SpectralDensity& J, double epsilon);
// Environment-modified density of states (1/2pi) J / [(e - omega_s - Delta)^2 + (J/2)^2].
double density_of_states(const SpectralDensity& J, const SystemParams& sys, double epsilon);
// int D(e) de over the support.
double continuum_weight(const SpectralDensity& J, const SystemParams& sys);

struct SteadyV {
    double value = 0.0;
    bool continuum_only = false;  // localized modes exist and their part is not included
};
SteadyV steady_v(const SpectralDensity& J, const SystemParams& sys, const BathParams& bath);

SteadyAsymptotics steady_asymptotics(const SpectralDensity& J, const SystemParams& sys,
                                     const BathParams& bath);

// First time after which the windowed RMS of |u| changes by less than `tolerance` between
// consecutive windows, for the rest of the trace.
std::optional<double> steady_time(const PropagatorTrace& u, double window = 5.0,
                                  double tolerance = 1e-4);

} // namespace nmqd
