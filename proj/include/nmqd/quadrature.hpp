// quadrature.hpp: adaptive Gauss-Kronrod integration and fixed Gauss-Legendre rules.
//
// Globally adaptive bisection on Boost's 15/31-point Gauss-Kronrod tables. Every module
// reports non-convergence the same way, through QuadratureError.
#pragma once

#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "nmqd/core.hpp"

namespace nmqd::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
};

struct Tolerance {
    double rel = 1e-10;   // relative to the integral of |f|
    double abs = 1e-14;
    int max_panels = 4000;
};

// Non-negative half of the symmetric 31-point Kronrod rule on [-1, 1]; the embedded
// 15-point Gauss rule uses the even-indexed nodes.
struct KronrodTable {
    std::array<double, 16> nodes;
    std::array<double, 16> kronrod_weights;
    std::array<double, 8> gauss_weights;
};
const KronrodTable& kronrod31();

namespace detail {

struct Panel {
    double a, b, value, error, l1;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel evaluate_panel(F& f, double a, double b)
{
    const auto& t = kronrod31();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double f0 = f(c);
    double k = t.kronrod_weights[0] * f0;
    double g = t.gauss_weights[0] * f0;
    double l1 = t.kronrod_weights[0] * std::abs(f0);
    for (std::size_t i = 1; i < 16; ++i) {
        const double fl = f(c - h * t.nodes[i]);
        const double fr = f(c + h * t.nodes[i]);
        k += t.kronrod_weights[i] * (fl + fr);
        l1 += t.kronrod_weights[i] * (std::abs(fl) + std::abs(fr));
        if (i % 2 == 0) g += t.gauss_weights[i / 2] * (fl + fr);
    }
    return {a, b, h * k, std::abs(h * (k - g)), std::abs(h) * l1};
}

} // namespace detail

// Integrates f over [a, b], first split at the interior points of the sorted `breaks`.
// Throws QuadratureError when the error estimate cannot be brought under
// max(tol.abs, tol.rel * int |f|) within tol.max_panels panels.
template <class F>
Result integrate(F&& f, double a, double b, std::span<const double> breaks = {}, Tolerance tol = {})
{
    std::priority_queue<detail::Panel> panels;
    double lo = a;
    for (double br : breaks) {
        if (br <= lo || br >= b) continue;
        panels.push(detail::evaluate_panel(f, lo, br));
        lo = br;
    }
    if (b > lo) panels.push(detail::evaluate_panel(f, lo, b));
    double value = 0.0, error = 0.0, l1 = 0.0;
    std::vector<detail::Panel> done;
    auto totals = [&] {
        value = error = l1 = 0.0;
        auto copy = panels;
        while (!copy.empty()) {
            value += copy.top().value;
            error += copy.top().error;
            l1 += copy.top().l1;
            copy.pop();
        }
        for (const auto& p : done) {
            value += p.value;
            error += p.error;
            l1 += p.l1;
        }
    };
    totals();
    int count = static_cast<int>(panels.size());
    while (!panels.empty() && error > std::max(tol.abs, tol.rel * l1) && count < tol.max_panels) {
        const detail::Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            done.push_back(worst);  // cannot split further in floating point
            continue;
        }
        const auto left = detail::evaluate_panel(f, worst.a, mid);
        const auto right = detail::evaluate_panel(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        panels.push(left);
        panels.push(right);
        ++count;
    }
    totals();
    if (!std::isfinite(value) || error > std::max(tol.abs, tol.rel * l1)) {
        throw QuadratureError("quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                                  "] did not converge (residual " + std::to_string(error) + ")",
                              error);
    }
    return {value, error};
}

// Points origin + first * factor^k below origin + last, for splitting integrands that are
// sharply structured next to `origin`.
std::vector<double> geometric_breaks(double origin, double first, double last, double factor = 10.0);

// Six-point Gauss-Legendre rule mapped to [0, 1].
struct UnitRule {
    std::array<double, 6> nodes;
    std::array<double, 6> weights;
};
const UnitRule& gauss_legendre6();

} // namespace nmqd::quad
