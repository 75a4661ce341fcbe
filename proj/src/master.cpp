#include "nmqd/master.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace nmqd {

namespace {

// Fourth-order finite-difference derivative at index i of uniformly sampled data.
template <class T>
T derivative(const std::vector<T>& f, std::size_t i, double h)
{
    const std::size_t n = f.size();
    if (n < 5) {
        if (n < 2) return T{};
        if (i == 0) return (f[1] - f[0]) / h;
        if (i == n - 1) return (f[n - 1] - f[n - 2]) / h;
        return (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    if (i >= 2 && i + 2 < n) return (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    if (i == 0) return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    if (i == 1) return (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    if (i == n - 1)
        return (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h);
    return (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h);
}

struct Rates {
    double omega_prime, gamma, gamma_tilde;
};

class CoefficientInterpolator {
public:
    explicit CoefficientInterpolator(const CoefficientTrace& c) : c_(c) {}

    // Cubic Lagrange interpolation on the four grid points around t = interval + x (in steps).
    Rates at(std::size_t interval, double x) const
    {
        const std::size_t n = c_.omega_prime.size();
        if (n < 4) {
            const std::size_t j = std::min(interval + 1, n - 1);
            auto lin = [&](const std::vector<double>& f) { return f[interval] + x * (f[j] - f[interval]); };
            return {lin(c_.omega_prime), lin(c_.gamma), lin(c_.gamma_tilde)};
        }
        std::size_t base = interval == 0 ? 0 : interval - 1;
        base = std::min(base, n - 4);
        const double s = static_cast<double>(interval) + x - static_cast<double>(base);
        double w[4];
        for (int k = 0; k < 4; ++k) {
            double p = 1.0;
            for (int l = 0; l < 4; ++l)
                if (l != k) p *= (s - l) / static_cast<double>(k - l);
            w[k] = p;
        }
        auto cubic = [&](const std::vector<double>& f) {
            double sum = 0.0;
            for (std::size_t k = 0; k < 4; ++k) sum += w[k] * f[base + k];
            return sum;
        };
        return {cubic(c_.omega_prime), cubic(c_.gamma), cubic(c_.gamma_tilde)};
    }

private:
    const CoefficientTrace& c_;
};

} // namespace

CoefficientTrace coefficients_from_uv(const PropagatorTrace& u, const CorrelationTrace& v)
{
    if (!(u.grid == v.grid) || u.u.size() != v.v.size() || u.u.size() != u.grid.size())
        throw InvalidArgument("coefficients_from_uv: propagator and correlation grids differ");
    const std::size_t size = u.u.size();
    const double h = u.grid.dt;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CoefficientTrace out{u.grid, std::vector<double>(size), std::vector<double>(size),
                         std::vector<double>(size), std::vector<bool>(size, false)};
    for (std::size_t i = 0; i < size; ++i) {
        if (std::abs(u.u[i]) < singular_threshold) {
            out.singular[i] = true;
            out.omega_prime[i] = out.gamma[i] = out.gamma_tilde[i] = nan;
            continue;
        }
        if (i == 0) {
            // du/dt = -i omega_s u and dv/dt = 0 hold exactly at t0.
            out.omega_prime[0] = u.omega_s;
            out.gamma[0] = 0.0;
            out.gamma_tilde[0] = 0.0;
            continue;
        }
        const Complex rate = derivative(u.u, i, h) / u.u[i];
        const double vdot = derivative(v.v, i, h);
        out.omega_prime[i] = -rate.imag();
        out.gamma[i] = -rate.real();
        out.gamma_tilde[i] = vdot + 2.0 * out.gamma[i] * v.v[i];
    }
    return out;
}

std::size_t first_singular_index(const CoefficientTrace& coeffs)
{
    for (std::size_t i = 0; i < coeffs.singular.size(); ++i)
        if (coeffs.singular[i]) return i;
    return coeffs.singular.size();
}

std::size_t lindblad_extent(const CoefficientTrace& coeffs)
{
    for (std::size_t i = 0; i < coeffs.singular.size(); ++i)
        if (coeffs.singular[i] || coeffs.gamma_tilde[i] < 0.0 || 2.0 * coeffs.gamma[i] + coeffs.gamma_tilde[i] < 0.0)
            return i;
    return coeffs.singular.size();
}

DensityMatrix master_rhs(const DensityMatrix& rho, double omega_prime, double gamma, double gamma_tilde,
                         Statistics statistics)
{
    const Eigen::Index dim = rho.rows();
    const bool boson = statistics == Statistics::Boson;
    DensityMatrix out(dim, dim);
    for (Eigen::Index n = 0; n < dim; ++n) {
        for (Eigen::Index m = 0; m < dim; ++m) {
            const double dm = static_cast<double>(m), dn = static_cast<double>(n);
            const Complex x = rho(m, n);
            const Complex lower = (m > 0 && n > 0) ? std::sqrt(dm * dn) * rho(m - 1, n - 1) : Complex(0.0);
            const Complex upper =
                (m + 1 < dim && n + 1 < dim) ? std::sqrt((dm + 1.0) * (dn + 1.0)) * rho(m + 1, n + 1) : Complex(0.0);
            Complex value = Complex(0.0, -omega_prime * (dm - dn)) * x;
            value += gamma * (2.0 * upper - (dm + dn) * x);
            if (boson) value += gamma_tilde * (lower + upper - (dm + dn + 1.0) * x);
            else value += gamma_tilde * (lower - upper + (dm + dn - 1.0) * x);
            out(m, n) = value;
        }
    }
    return out;
}

std::vector<FockDensityMatrix> integrate_master_equation(const CoefficientTrace& coeffs,
                                                         const FockDensityMatrix& rho0,
                                                         const std::vector<std::size_t>& sample_indices,
                                                         const MasterOptions& options)
{
    const std::size_t size = coeffs.omega_prime.size();
    if (size == 0) throw InvalidArgument("integrate_master_equation: empty coefficient trace");
    if (!std::is_sorted(sample_indices.begin(), sample_indices.end()))
        throw InvalidArgument("integrate_master_equation: sample indices must be ascending");
    if (sample_indices.empty()) return {};
    const std::size_t last = sample_indices.back();
    if (last >= size) throw InvalidArgument("integrate_master_equation: sample index beyond the trace");
    const std::size_t stop = std::min(size, last + 3);
    for (std::size_t i = 0; i < stop; ++i)
        if (coeffs.singular[i])
            throw InvalidArgument("master-equation coefficients are singular at t = " +
                                  std::to_string(coeffs.grid.time(i)) +
                                  " (exact zero of u); sample before that time");
    if (rho0.statistics == Statistics::Fermion && rho0.rho.rows() != 2)
        throw InvalidArgument("fermionic states are two-dimensional");

    const double dt = coeffs.grid.dt;
    const CoefficientInterpolator interp(coeffs);
    const Statistics stats = rho0.statistics;
    const double levels = static_cast<double>(rho0.rho.rows());
    DensityMatrix rho = rho0.rho;
    std::vector<FockDensityMatrix> out;
    std::size_t next = 0;
    auto emit = [&](std::size_t i) {
        while (next < sample_indices.size() && sample_indices[next] == i) {
            out.push_back({rho, stats, coeffs.grid.time(i)});
            ++next;
        }
    };
    emit(0);
    for (std::size_t i = 0; i < last; ++i) {
        double radius = 0.0;
        for (std::size_t j = i; j <= std::min(i + 1, size - 1); ++j)
            radius = std::max(radius, std::abs(coeffs.omega_prime[j]) * levels +
                                          2.0 * (std::abs(coeffs.gamma[j]) + std::abs(coeffs.gamma_tilde[j])) * (levels + 1.0));
        const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(dt * radius / options.max_step_phase)));
        if (substeps > options.max_substeps)
            throw InstabilityError("master equation is too stiff near t = " + std::to_string(coeffs.grid.time(i)));
        const double h = dt / static_cast<double>(substeps);
        for (std::size_t s = 0; s < substeps; ++s) {
            const double x0 = static_cast<double>(s) / static_cast<double>(substeps);
            const double xm = (static_cast<double>(s) + 0.5) / static_cast<double>(substeps);
            const double x1 = (static_cast<double>(s) + 1.0) / static_cast<double>(substeps);
            const Rates r0 = interp.at(i, x0), rm = interp.at(i, xm), r1 = interp.at(i, x1);
            auto f = [&](const DensityMatrix& x, const Rates& r) {
                return master_rhs(x, r.omega_prime, r.gamma, r.gamma_tilde, stats);
            };
            const DensityMatrix k1 = f(rho, r0);
            const DensityMatrix k2 = f(rho + 0.5 * h * k1, rm);
            const DensityMatrix k3 = f(rho + 0.5 * h * k2, rm);
            const DensityMatrix k4 = f(rho + h * k3, r1);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            const DensityMatrix adj = rho.adjoint();
            rho = 0.5 * (rho + adj);
        }
        if (stats == Statistics::Boson) {
            const double top = rho(rho.rows() - 1, rho.cols() - 1).real();
            if (top > options.truncation_tolerance)
                throw TruncationError("top Fock level population " + std::to_string(top) + " at t = " +
                                      std::to_string(coeffs.grid.time(i + 1)) + " exceeds " +
                                      std::to_string(options.truncation_tolerance) + "; increase n_max");
        }
        emit(i + 1);
    }
    return out;
}

} // namespace nmqd
