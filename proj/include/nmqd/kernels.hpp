// kernels.hpp: Fourier transforms of spectral functions on graded frequency meshes.
#pragma once

#include <vector>

#include "nmqd/spectral.hpp"

namespace nmqd {

// int dw F(w) exp(-i w tau) / 2pi for a real F sampled on a mesh and taken piecewise linear
// between nodes (Filon rule, exact in tau). Optional end caps integrate a power-law
// singularity F ~ |w - edge|^p on the outermost panel.
class SpectralTransform {
public:
    SpectralTransform() = default;
    SpectralTransform(std::vector<double> nodes, std::vector<double> values);

    // Adds the contribution of [edge, edge + width] (width may be negative) where F behaves
    // like a power of the distance to `edge`; `f_far` is F(edge + width), `f_half` is
    // F(edge + width/2).
    void add_end_cap(double edge, double width, double f_far, double f_half);

    Complex operator()(double tau) const;
    // The tau = 0 value, int F dw / 2pi.
    double integral() const;

    const std::vector<double>& nodes() const { return nodes_; }

private:
    struct Cap {
        double centre;
        double weight;
    };
    std::vector<double> nodes_;
    std::vector<double> values_;
    std::vector<Cap> caps_;
};

// Nodes on [lo, hi] whose spacing grows geometrically away from a graded end and is capped
// at `max_spacing` elsewhere. A graded end is left uncovered by `end_gap` so an end cap can
// take over there. Every point of `extra` inside the interval becomes a node.
std::vector<double> frequency_mesh(double lo, double hi, double max_spacing, bool grade_lo,
                                   bool grade_hi, double end_gap,
                                   const std::vector<double>& extra = {});

SpectralTransform memory_transform(const SpectralDensity& J);
SpectralTransform noise_transform(const SpectralDensity& J, const BathParams& bath,
                                  Statistics statistics);

// Hilbert transform int F(w') / (2pi (w - w')) dw' of a piecewise-linear F and its derivative
// in w, exact panel by panel. Inside the nodes it is the principal value.
SelfEnergy piecewise_linear_hilbert(const std::vector<double>& nodes,
                                    const std::vector<double>& values, double omega,
                                    bool with_derivative = true);

// Samples f(k dt), k = 0..count-1.
std::vector<Complex> sample_kernel(const SpectralTransform& transform, double dt,
                                   std::size_t count);

} // namespace nmqd
