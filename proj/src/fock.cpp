#include "nmqd/fock.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace nmqd {

namespace {

constexpr double unit_tolerance = 1e-9;

int highest_occupied(const DensityMatrix& rho)
{
    for (Eigen::Index n = rho.rows() - 1; n > 0; --n)
        if (rho.row(n).cwiseAbs().maxCoeff() > 0.0 || rho.col(n).cwiseAbs().maxCoeff() > 0.0)
            return static_cast<int>(n);
    return 0;
}

DensityMatrix padded(const DensityMatrix& rho, int n_max)
{
    DensityMatrix out = DensityMatrix::Zero(n_max + 1, n_max + 1);
    const auto keep = std::min<Eigen::Index>(rho.rows(), n_max + 1);
    out.topLeftCorner(keep, keep) = rho.topLeftCorner(keep, keep);
    return out;
}

void symmetrize(DensityMatrix& rho)
{
    const DensityMatrix adj = rho.adjoint();
    rho = 0.5 * (rho + adj);
}

FockDensityMatrix evolve_fermion(const FockDensityMatrix& rho0, Complex u, double v)
{
    if (rho0.rho.rows() != 2) throw InvalidArgument("fermionic states are two-dimensional");
    if (v < -unit_tolerance || v > 1.0 + unit_tolerance)
        throw InvalidArgument("fermionic correlation v must lie in [0, 1]");
    FockDensityMatrix out{DensityMatrix::Zero(2, 2), Statistics::Fermion, 0.0};
    const double occupied = std::norm(u) * rho0.rho(1, 1).real() + v;
    out.rho(1, 1) = occupied;
    out.rho(0, 0) = 1.0 - occupied;
    out.rho(1, 0) = u * rho0.rho(1, 0);
    out.rho(0, 1) = std::conj(out.rho(1, 0));
    return out;
}

FockDensityMatrix evolve_boson(const FockDensityMatrix& rho0, Complex u, double v, int n_max,
                               double tail_tolerance)
{
    const int source_max = highest_occupied(rho0.rho);
    if (u == Complex(1.0, 0.0) && v == 0.0) {
        if (source_max > n_max)
            throw TruncationError("initial state occupies level " + std::to_string(source_max) +
                                  " beyond n_max = " + std::to_string(n_max));
        return {padded(rho0.rho, n_max), Statistics::Boson, 0.0};
    }
    const double one_plus_v = 1.0 + v;
    const Complex w = u / one_plus_v;
    const double d = std::max(0.0, 1.0 - std::norm(u) / one_plus_v);
    const double ratio = v / one_plus_v;

    const int top = std::max(n_max, source_max);
    std::vector<double> log_fact(static_cast<std::size_t>(top) + 2, 0.0);
    for (std::size_t i = 1; i < log_fact.size(); ++i) log_fact[i] = std::lgamma(static_cast<double>(i) + 1.0);
    auto lf = [&](int i) { return log_fact[static_cast<std::size_t>(i)]; };
    std::vector<Complex> w_pow(static_cast<std::size_t>(top) + 1), wbar_pow(w_pow.size());
    std::vector<double> d_pow(w_pow.size()), r(static_cast<std::size_t>(n_max) + 1);
    w_pow[0] = wbar_pow[0] = 1.0;
    d_pow[0] = 1.0;
    for (std::size_t i = 1; i < w_pow.size(); ++i) {
        w_pow[i] = w_pow[i - 1] * w;
        wbar_pow[i] = wbar_pow[i - 1] * std::conj(w);
        d_pow[i] = d_pow[i - 1] * d;
    }
    r[0] = 1.0 / one_plus_v;
    for (std::size_t j = 1; j < r.size(); ++j) r[j] = r[j - 1] * ratio;

    DensityMatrix rho = DensityMatrix::Zero(n_max + 1, n_max + 1);
    for (int m = 0; m <= source_max; ++m) {
        for (int n = 0; n <= source_max; ++n) {
            const Complex weight = rho0.rho(m, n);
            if (weight == Complex(0.0, 0.0)) continue;
            for (int k = 0; k <= std::min(m, n); ++k) {
                if (k > 0 && d_pow[static_cast<std::size_t>(k)] == 0.0) break;
                const int a = m - k, b = n - k;
                // log of C_mk C_nk = sqrt(m! n!) / ((m-k)! (n-k)! k!)
                const double log_c = 0.5 * (lf(m) + lf(n)) - lf(a) - lf(b) - lf(k);
                const Complex base = weight * d_pow[static_cast<std::size_t>(k)] *
                                     w_pow[static_cast<std::size_t>(a)] *
                                     wbar_pow[static_cast<std::size_t>(b)];
                if (base == Complex(0.0, 0.0)) continue;
                for (int j = 0; j + a <= n_max && j + b <= n_max; ++j) {
                    const double rj = r[static_cast<std::size_t>(j)];
                    if (rj == 0.0) break;
                    const int p = j + a, q = j + b;
                    const double factor = std::exp(log_c + 0.5 * (lf(p) + lf(q)) - lf(j));
                    rho(p, q) += base * (rj * factor);
                }
            }
        }
    }
    symmetrize(rho);
    const double deficit = 1.0 - rho.trace().real();
    if (deficit > tail_tolerance)
        throw TruncationError("truncated state lost weight " + std::to_string(deficit) +
                              " above n_max = " + std::to_string(n_max) + "; increase n_max");
    return {rho, Statistics::Boson, 0.0};
}

} // namespace

std::string_view to_string(SteadyStateLabel label)
{
    switch (label) {
    case SteadyStateLabel::Thermal: return "Thermal";
    case SteadyStateLabel::ThermalLike: return "ThermalLike";
    case SteadyStateLabel::Qumemory: return "Qumemory";
    case SteadyStateLabel::OscillatingQumemory: return "OscillatingQumemory";
    }
    return "Unknown";
}

InitialState fock_superposition(std::vector<Complex> coefficients, Statistics statistics)
{
    if (coefficients.empty()) throw InvalidArgument("initial state needs at least one amplitude");
    if (statistics == Statistics::Fermion && coefficients.size() > 2)
        throw InvalidArgument("fermionic initial states have at most two amplitudes");
    if (statistics == Statistics::Fermion) coefficients.resize(2, Complex(0.0, 0.0));
    double norm = 0.0;
    for (const auto& c : coefficients) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw InvalidArgument("initial amplitudes must be finite");
        norm += std::norm(c);
    }
    if (std::abs(norm - 1.0) > norm_tolerance)
        throw InvalidArgument("initial amplitudes have squared norm " + std::to_string(norm) +
                              ", expected 1");
    return {std::move(coefficients), statistics};
}

int minimum_cat_n_max(Complex alpha0)
{
    const double a = std::abs(alpha0);
    return static_cast<int>(std::ceil(a * a + 8.0 * a + 10.0));
}

int default_boson_n_max(Complex alpha0, double v_max)
{
    return std::max({30, minimum_cat_n_max(alpha0), static_cast<int>(std::ceil(10.0 * (1.0 + v_max)))});
}

InitialState cat_state(Complex alpha0, double relative_phase, int n_max)
{
    if (n_max < minimum_cat_n_max(alpha0))
        throw InvalidArgument("n_max = " + std::to_string(n_max) + " is too small for a cat of |alpha0| = " +
                              std::to_string(std::abs(alpha0)) + "; need at least " +
                              std::to_string(minimum_cat_n_max(alpha0)));
    const double a2 = std::norm(alpha0);
    const double norm2 = 2.0 * (1.0 + std::cos(relative_phase) * std::exp(-2.0 * a2));
    if (norm2 < 1e-300) throw InvalidArgument("the odd cat of a vanishing amplitude is not normalizable");
    const Complex phase = std::polar(1.0, relative_phase);
    const double envelope = std::exp(-0.5 * a2) / std::sqrt(norm2);
    std::vector<Complex> c(static_cast<std::size_t>(n_max) + 1);
    Complex term(1.0, 0.0);  // alpha0^n / sqrt(n!)
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0) term *= alpha0 / std::sqrt(static_cast<double>(n));
        const double parity = n % 2 == 0 ? 1.0 : -1.0;
        c[static_cast<std::size_t>(n)] = (1.0 + phase * parity) * term * envelope;
    }
    return fock_superposition(std::move(c), Statistics::Boson);
}

InitialState resized(const InitialState& init, int n_max)
{
    InitialState out = init;
    const auto dim = static_cast<std::size_t>(n_max) + 1;
    for (std::size_t i = dim; i < out.coefficients.size(); ++i)
        if (std::norm(out.coefficients[i]) > norm_tolerance)
            throw TruncationError("initial state occupies level " + std::to_string(i) +
                                  " beyond n_max = " + std::to_string(n_max));
    out.coefficients.resize(dim, Complex(0.0, 0.0));
    return out;
}

FockDensityMatrix pure_state(const InitialState& init)
{
    const auto dim = static_cast<Eigen::Index>(init.coefficients.size());
    Eigen::VectorXcd psi(dim);
    for (Eigen::Index i = 0; i < dim; ++i) psi(i) = init.coefficients[static_cast<std::size_t>(i)];
    return {psi * psi.adjoint(), init.statistics, 0.0};
}

FockDensityMatrix thermal_state(double mean, int n_max)
{
    if (mean < 0.0) throw InvalidArgument("thermal mean occupation must be >= 0");
    DensityMatrix rho = DensityMatrix::Zero(n_max + 1, n_max + 1);
    const double ratio = mean / (1.0 + mean);
    double p = 1.0 / (1.0 + mean);
    for (int n = 0; n <= n_max; ++n) {
        rho(n, n) = p;
        p *= ratio;
    }
    return {rho, Statistics::Boson, 0.0};
}

FockDensityMatrix evolve_state(const FockDensityMatrix& rho0, Complex u_t, double v_t, int n_max,
                               double tail_tolerance)
{
    if (!(std::abs(u_t) <= 1.0 + unit_tolerance)) throw InvalidArgument("evolve_state requires |u| <= 1");
    if (!(v_t >= -unit_tolerance)) throw InvalidArgument("evolve_state requires v >= 0");
    const double v = std::max(0.0, v_t);
    if (rho0.statistics == Statistics::Fermion) return evolve_fermion(rho0, u_t, v);
    if (n_max < 0) throw InvalidArgument("n_max must be >= 0");
    return evolve_boson(rho0, u_t, v, n_max, tail_tolerance);
}

FockDensityMatrix evolve_state(const InitialState& init, Complex u_t, double v_t, int n_max,
                               double tail_tolerance)
{
    return evolve_state(pure_state(init), u_t, v_t, n_max, tail_tolerance);
}

double mean_particle_number(const FockDensityMatrix& rho)
{
    double sum = 0.0;
    for (Eigen::Index n = 1; n < rho.rho.rows(); ++n) sum += static_cast<double>(n) * rho.rho(n, n).real();
    return sum;
}

double coherence_norm(const FockDensityMatrix& rho)
{
    double sum = 0.0;
    for (Eigen::Index m = 0; m < rho.rho.rows(); ++m)
        for (Eigen::Index n = 0; n < rho.rho.cols(); ++n)
            if (m != n) sum += std::norm(rho.rho(m, n));
    return std::sqrt(sum);
}

double trace_distance(const FockDensityMatrix& a, const FockDensityMatrix& b)
{
    const int dim = std::max(a.n_max(), b.n_max());
    DensityMatrix diff = padded(a.rho, dim) - padded(b.rho, dim);
    symmetrize(diff);
    Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(diff, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double min_eigenvalue(const FockDensityMatrix& rho)
{
    DensityMatrix h = rho.rho;
    symmetrize(h);
    Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double hermiticity_error(const FockDensityMatrix& rho)
{
    return (rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff();
}

SteadyStateClass classify_steady_state(const std::vector<LocalizedMode>& modes, const PropagatorTrace& u,
                                       const CorrelationTrace& v, const SystemParams& sys,
                                       const BathParams& bath, const ClassificationThresholds& thresholds)
{
    if (!(u.grid == v.grid) || u.u.size() != v.v.size() || u.u.empty())
        throw InvalidArgument("classify_steady_state: propagator and correlation grids differ");
    SteadyStateClass out;
    auto& ev = out.evidence;
    ev.n_localized_modes = modes.size();
    for (const auto& m : modes) ev.u_asymptote += m.amplitude;
    ev.u_at_horizon = std::abs(u.u.back());
    ev.steady_v = v.v.back();
    ev.thermal_occupation = occupation(sys.omega_s, bath, sys.statistics);
    const double nbar = ev.thermal_occupation;
    ev.thermal_deviation = nbar > 0.0 ? std::abs(ev.steady_v - nbar) / nbar : std::abs(ev.steady_v - nbar);
    ev.steady_time = steady_time(u);
    if (modes.size() >= 2) {
        out.label = SteadyStateLabel::OscillatingQumemory;
    } else if (modes.size() == 1) {
        out.label = SteadyStateLabel::Qumemory;
    } else {
        if (!(ev.u_at_horizon < thresholds.zero_u))
            throw InconclusiveError("no localized mode, but |u| = " + std::to_string(ev.u_at_horizon) +
                                    " at the horizon t = " + std::to_string(u.grid.horizon()) +
                                    " has not decayed below " + std::to_string(thresholds.zero_u) +
                                    "; raise the horizon");
        const bool thermal = std::abs(ev.steady_v - nbar) <= thresholds.thermal_band * nbar + thresholds.absolute_floor;
        out.label = thermal ? SteadyStateLabel::Thermal : SteadyStateLabel::ThermalLike;
    }
    return out;
}

} // namespace nmqd
