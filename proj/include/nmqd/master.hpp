// master.hpp: time-dependent master-equation coefficients and direct integration of the
// single-mode master equation in a truncated Fock space.
#pragma once

#include <vector>

#include "nmqd/fock.hpp"

namespace nmqd {

struct CoefficientTrace {
    TimeGrid grid;
    std::vector<double> omega_prime;  // renormalized frequency
    std::vector<double> gamma;        // dissipation rate
    std::vector<double> gamma_tilde;  // fluctuation (noise) rate
    std::vector<bool> singular;       // |u| fell below singular_threshold; values are NaN there
};

inline constexpr double singular_threshold = 1e-8;

// omega' = -Im(du/dt / u), gamma = -Re(du/dt / u), gamma~ = dv/dt + 2 gamma v.
CoefficientTrace coefficients_from_uv(const PropagatorTrace& u, const CorrelationTrace& v);

// Index of the first singular grid point, or the trace size when there is none.
std::size_t first_singular_index(const CoefficientTrace& coeffs);

// drho/dt = -i omega' [n, rho] + gamma (2 a rho a+ - n rho - rho n) + gamma~ K(rho), with
// K = a+ rho a + a rho a+ - n rho - rho a a+ (bosons) or
// K = a+ rho a - a rho a+ + n rho - rho a a+ (fermions).
// Index of the first grid point where the boson generator stops being of Lindblad form
// (raising rate gamma~ < 0 or lowering rate 2 gamma + gamma~ < 0) or the coefficients are singular;
// the trace size when there is none. Past it, truncated Fock-space integration amplifies the
// truncation error exponentially and the direct integration is no longer a usable cross-check.
std::size_t lindblad_extent(const CoefficientTrace& coeffs);

DensityMatrix master_rhs(const DensityMatrix& rho, double omega_prime, double gamma,
                         double gamma_tilde, Statistics statistics);

struct MasterOptions {
    double truncation_tolerance = 1e-6;  // largest allowed top-level population
    double max_step_phase = 0.5;         // bound on dt * (spectral radius estimate) per RK4 substep
    std::size_t max_substeps = 100000;
};

// Fourth-order Runge-Kutta integration from grid index 0, returning the state at every
// requested grid index (sorted ascending). Coefficients between grid points are interpolated by
// cubic Lagrange polynomials.
std::vector<FockDensityMatrix> integrate_master_equation(const CoefficientTrace& coeffs,
                                                         const FockDensityMatrix& rho0,
                                                         const std::vector<std::size_t>& sample_indices,
                                                         const MasterOptions& options = {});

} // namespace nmqd
