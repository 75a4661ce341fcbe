// spectral.hpp: reservoir spectral densities, memory kernels, self-energy and localized modes.
#pragma once

#include <filesystem>
#include <limits>
#include <variant>
#include <vector>

#include "nmqd/core.hpp"

namespace nmqd {

// J(w) = 2*pi*eta*w*(w/omega_c)^(s-1)*exp(-w/omega_c) on w >= 0.
struct OhmicFamily {
    double eta = 0.1;
    double s = 1.0;        // sub-Ohmic < 1 < super-Ohmic
    double omega_c = 5.0;  // cutoff frequency
};

// Semicircular band J(w) = eta^2*sqrt(4 xi^2 - (w - omega_c)^2) of a coupled-cavity array.
struct TightBinding {
    double eta = 3.0;
    double xi = 0.25;      // intercavity hopping
    double omega_c = 1.0;  // band centre
};

// Piecewise-linear J on a strictly increasing frequency grid; zero outside [front, back].
struct Tabulated {
    std::vector<double> omega;
    std::vector<double> values;

    // Reads a two-column CSV (omega, J) with one header line.
    static Tabulated from_csv(const std::filesystem::path& path);
};

using SpectralDensity = std::variant<OhmicFamily, TightBinding, Tabulated>;

struct SystemParams {
    double omega_s = 1.0;
    Statistics statistics = Statistics::Boson;
};

struct BathParams {
    double temperature = 0.0;
    double mu = 0.0;
};

struct LocalizedMode {
    double omega_b = 0.0;
    double amplitude = 0.0;
    bool near_edge = false;  // root sat inside the band-edge buffer and was clamped to it
};

struct SelfEnergy {
    double delta = 0.0;
    double derivative = 0.0;
};

// Closed interval carrying J; `hi` is +inf for the Ohmic family.
struct Support {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double w) const { return w >= lo && w <= hi; }
};

inline constexpr double root_tolerance = 1e-10;
inline constexpr double edge_buffer = 1e-8;

void validate(const SpectralDensity& J);
void validate(const SystemParams& sys);
// Checks T >= 0 and that a bosonic occupation has no pole on the support.
void validate(const BathParams& bath, const SpectralDensity& J, Statistics statistics);

Support support(const SpectralDensity& J);
// Upper frequency used by quadratures: the band top, or omega_c*max(40, 10 s) for Ohmic.
double integration_cutoff(const SpectralDensity& J);
// True when J vanishes identically (eta = 0 or an all-zero table).
bool is_empty(const SpectralDensity& J);
// The coupling parameter eta, or 1 for a table (its overall scale).
double coupling(const SpectralDensity& J);
// Same density with its coupling replaced by `eta`; a table has its values scaled by eta.
SpectralDensity with_coupling(const SpectralDensity& J, double eta);

double evaluate(const SpectralDensity& J, double omega);

// g(tau) = int dw J(w) exp(-i w tau) / 2pi.
Complex memory_kernel(const SpectralDensity& J, double tau);
// Noise kernel int dw J(w) nbar(w) exp(-i w tau) / 2pi.
Complex noise_kernel(const SpectralDensity& J, const BathParams& bath, Statistics statistics,
                     double tau);

// Level shift Delta(w) = int dw' J(w') / (2pi (w - w')) and its derivative, for w off the support.
SelfEnergy self_energy(const SpectralDensity& J, double omega);
// One-sided limit of Delta at a finite support edge; may be infinite for tables with J(edge) > 0.
double edge_self_energy(const SpectralDensity& J, bool upper);

std::vector<LocalizedMode> localized_modes(const SpectralDensity& J, const SystemParams& sys);
double critical_coupling(const SpectralDensity& J, const SystemParams& sys);

double occupation(double epsilon, const BathParams& bath, Statistics statistics);

} // namespace nmqd
