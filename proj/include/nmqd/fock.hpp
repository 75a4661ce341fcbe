// fock.hpp: initial states, the exact reduced density matrix from (u, v), observables and
// steady-state classification.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nmqd/greens.hpp"

namespace nmqd {

using DensityMatrix = Eigen::MatrixXcd;

// Amplitudes c_n of a pure state sum_n c_n |n>.
struct InitialState {
    std::vector<Complex> coefficients;
    Statistics statistics = Statistics::Boson;

    int n_max() const { return static_cast<int>(coefficients.size()) - 1; }
};

struct FockDensityMatrix {
    DensityMatrix rho;
    Statistics statistics = Statistics::Boson;
    double time = 0.0;

    int n_max() const { return static_cast<int>(rho.rows()) - 1; }
};

enum class SteadyStateLabel { Thermal, ThermalLike, Qumemory, OscillatingQumemory };

struct ClassificationEvidence {
    std::size_t n_localized_modes = 0;
    double u_asymptote = 0.0;        // sum of mode amplitudes
    double u_at_horizon = 0.0;       // |u| at the end of the trace
    double steady_v = 0.0;           // v at the end of the trace
    double thermal_occupation = 0.0; // nbar(omega_s, T)
    double thermal_deviation = 0.0;  // |steady_v - nbar| / nbar (absolute when nbar = 0)
    std::optional<double> steady_time;
};

struct SteadyStateClass {
    SteadyStateLabel label = SteadyStateLabel::Thermal;
    ClassificationEvidence evidence;
};

struct ClassificationThresholds {
    double thermal_band = 0.05;
    double zero_u = 1e-2;
    double absolute_floor = 1e-6;
};

inline constexpr double norm_tolerance = 1e-10;

std::string_view to_string(SteadyStateLabel label);

// Normalizes nothing: the amplitudes must already have unit norm.
InitialState fock_superposition(std::vector<Complex> coefficients, Statistics statistics);
// (|alpha0> + e^{i phase} |-alpha0>) / N truncated at n_max.
InitialState cat_state(Complex alpha0, double relative_phase, int n_max);
// Smallest n_max the cat rule |alpha0|^2 + 8|alpha0| + 10 allows.
int minimum_cat_n_max(Complex alpha0);
// max(30, cat rule, 10 (1 + v_max)).
int default_boson_n_max(Complex alpha0, double v_max);
// Zero-pads (or checks and trims) the amplitudes to dimension n_max + 1.
InitialState resized(const InitialState& init, int n_max);

FockDensityMatrix pure_state(const InitialState& init);
FockDensityMatrix thermal_state(double mean, int n_max);

// Exact state at the time where the propagator is u_t and the correlation v_t.
FockDensityMatrix evolve_state(const InitialState& init, Complex u_t, double v_t, int n_max,
                               double tail_tolerance = 1e-8);
// Same, for a mixed initial state.
FockDensityMatrix evolve_state(const FockDensityMatrix& rho0, Complex u_t, double v_t, int n_max,
                               double tail_tolerance = 1e-8);

double mean_particle_number(const FockDensityMatrix& rho);
double coherence_norm(const FockDensityMatrix& rho);
double trace_distance(const FockDensityMatrix& a, const FockDensityMatrix& b);
double min_eigenvalue(const FockDensityMatrix& rho);
double hermiticity_error(const FockDensityMatrix& rho);

SteadyStateClass classify_steady_state(const std::vector<LocalizedMode>& modes,
                                       const PropagatorTrace& u, const CorrelationTrace& v,
                                       const SystemParams& sys, const BathParams& bath,
                                       const ClassificationThresholds& thresholds = {});

} // namespace nmqd
