// oracle.hpp: brute-force reference for u and v from a reservoir discretized into explicit modes.
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nmqd/greens.hpp"

namespace nmqd {

struct DiscretizedBath {
    std::vector<double> frequencies;
    std::vector<double> couplings;  // g_k with g_k^2 = J(w_k) dw_k / 2pi

    std::size_t size() const { return frequencies.size(); }
    double coupling_weight() const;  // sum of g_k^2
};

// Midpoint rule in a mapped variable x in (0, 1): the Ohmic family uses
// w = -L ln(1 - x (1 - exp(-w_cut / L))) with L = 2 omega_c, tight binding w = omega_c - 2 xi cos(pi x),
// and tables a uniform midpoint rule between the first and last node.
DiscretizedBath discretize(const SpectralDensity& J, std::size_t modes);

inline constexpr std::size_t default_oracle_modes = 400;

// Exact single-particle evolution under the star Hamiltonian (diagonal w_s, w_k; first row and
// column g_k), diagonalized once.
class StarEvolution {
public:
    StarEvolution(const DiscretizedBath& bath, const SystemParams& sys);

    // Row 0 of exp(-i H t): entry 0 is u(t), entry k the amplitude on bath mode k.
    Eigen::VectorXcd system_row(double t) const;
    Complex u(double t) const;
    double v(double t, const BathParams& bath, Statistics statistics) const;

private:
    std::vector<double> frequencies_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd vectors_;
};

Complex exact_u(const DiscretizedBath& bath, const SystemParams& sys, double t);
double exact_v(const DiscretizedBath& bath, const SystemParams& sys, const BathParams& bath_params,
               Statistics statistics, double t);

// Whole traces on a grid (times measured from grid.t0), sharing one diagonalization.
PropagatorTrace exact_u_trace(const DiscretizedBath& bath, const SystemParams& sys, const TimeGrid& grid);
CorrelationTrace exact_v_trace(const DiscretizedBath& bath, const SystemParams& sys,
                               const BathParams& bath_params, const TimeGrid& grid);

} // namespace nmqd
