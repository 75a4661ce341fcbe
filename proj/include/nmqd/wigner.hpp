// wigner.hpp: Wigner quasi-probability distribution of a Fock-basis density matrix.
#pragma once

#include <vector>

#include "nmqd/fock.hpp"

namespace nmqd {

// Quadratures x = (a + a+)/sqrt(2), p = (a - a+)/(i sqrt(2)), so alpha = (x + i p)/sqrt(2).
struct PhaseSpaceGrid {
    double x_min = -5.0, x_max = 5.0;
    double p_min = -5.0, p_max = 5.0;
    std::size_t x_points = 201, p_points = 201;

    double x(std::size_t i) const;
    double p(std::size_t j) const;
    double dx() const { return (x_max - x_min) / static_cast<double>(x_points - 1); }
    double dp() const { return (p_max - p_min) / static_cast<double>(p_points - 1); }
    void validate() const;
    bool operator==(const PhaseSpaceGrid&) const = default;
};

// values[j * x_points + i] holds W(x(i), p(j)); rows run from p_min upward.
struct WignerFrame {
    PhaseSpaceGrid grid;
    std::vector<double> values;
    double time = 0.0;

    double at(std::size_t i, std::size_t j) const { return values[j * grid.x_points + i]; }
    double min() const;
    double max() const;
    // Riemann sum of W dx dp over the grid.
    double integral() const;
};

// W before discarding the imaginary part, which vanishes for Hermitian rho.
Complex wigner_point(const FockDensityMatrix& rho, double x, double p);

// Throws InvalidArgument for fermionic states and for imaginary residues above 1e-10.
WignerFrame wigner_transform(const FockDensityMatrix& rho, const PhaseSpaceGrid& grid = {});

} // namespace nmqd
