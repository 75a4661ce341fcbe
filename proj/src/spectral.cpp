#include "nmqd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nmqd/kernels.hpp"
#include "nmqd/quadrature.hpp"

namespace nmqd {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double ohmic_value(const OhmicFamily& o, double w)
{
    if (w <= 0.0) return 0.0;
    const double x = w / o.omega_c;
    return two_pi * o.eta * o.omega_c * std::pow(x, o.s) * std::exp(-x);
}

double band_value(const TightBinding& tb, double w)
{
    const double z = w - tb.omega_c;
    const double r2 = 4.0 * tb.xi * tb.xi - z * z;
    return r2 > 0.0 ? tb.eta * tb.eta * std::sqrt(r2) : 0.0;
}

double table_value(const Tabulated& tab, double w)
{
    const auto& x = tab.omega;
    if (w < x.front() || w > x.back()) return 0.0;
    auto it = std::upper_bound(x.begin(), x.end(), w);
    if (it == x.end()) return tab.values.back();
    const auto i = static_cast<std::size_t>(it - x.begin());
    const double t = (w - x[i - 1]) / (x[i] - x[i - 1]);
    return tab.values[i - 1] + t * (tab.values[i] - tab.values[i - 1]);
}

SelfEnergy ohmic_self_energy(const OhmicFamily& o, double w)
{
    // w < 0: Delta = -(1/2pi) int J(x)/(x + a) dx, a = -w.
    const double a = -w;
    const double cut = integration_cutoff(o);
    auto breaks = quad::geometric_breaks(0.0, 1e-12 * o.omega_c, cut, 10.0);
    breaks.push_back(a);
    std::sort(breaks.begin(), breaks.end());
    const quad::Tolerance tol{1e-11, 1e-300, 4000};
    const auto d = quad::integrate([&](double x) { return ohmic_value(o, x) / (x + a); }, 0.0, cut,
                                   breaks, tol);
    const auto dp = quad::integrate(
        [&](double x) { return ohmic_value(o, x) / ((x + a) * (x + a)); }, 0.0, cut, breaks, tol);
    return {-d.value / two_pi, -dp.value / two_pi};
}

SelfEnergy band_self_energy(const TightBinding& tb, double w)
{
    const double z = w - tb.omega_c;
    const double r = std::sqrt(z * z - 4.0 * tb.xi * tb.xi);
    const double sign = z > 0.0 ? 1.0 : -1.0;
    const double half_eta2 = 0.5 * tb.eta * tb.eta;
    return {half_eta2 * (z - sign * r), half_eta2 * (1.0 - std::abs(z) / r)};
}

struct Side {
    bool upper;
    double edge;
};

// The monotone function omega - omega_s - Delta(omega) off one side of the support.
LocalizedMode find_mode(const SpectralDensity& J, const SystemParams& sys, Side side,
                        double edge_delta, bool& found)
{
    found = false;
    const double dir = side.upper ? 1.0 : -1.0;
    auto f = [&](double w) { return w - sys.omega_s - self_energy(J, w).delta; };
    const double f_edge = side.edge - sys.omega_s - edge_delta;
    // Lower side: f rises from -inf to f_edge; upper side: f rises from f_edge to +inf.
    if (side.upper ? !(f_edge < 0.0) : !(f_edge > 0.0)) return {};
    found = true;
    const double scale = sys.omega_s;
    const double buffer = edge_buffer * scale;
    const double w_buf = side.edge + dir * buffer;
    const double f_buf = f(w_buf);
    auto amplitude = [&](double w) { return 1.0 / (1.0 - self_energy(J, w).derivative); };
    auto outside_root = [&](double fv) { return side.upper ? fv < 0.0 : fv > 0.0; };
    if (!outside_root(f_buf)) return {w_buf, amplitude(w_buf), true};

    // Geometric bracket grid of 10^3 points; f is monotone so the sign change is located by
    // bisection over grid indices.
    const double reach = std::abs(side.edge - sys.omega_s) + std::abs(self_energy(J, w_buf).delta) + scale;
    constexpr int grid_points = 1000;
    const double ratio = std::pow(reach / buffer, 1.0 / grid_points);
    auto grid = [&](int k) { return side.edge + dir * buffer * std::pow(ratio, k); };
    int inside = 0, outside = grid_points;
    if (outside_root(f(grid(outside))))
        throw RootFindingError("localized-mode scan found no sign change", std::min(w_buf, grid(outside)),
                               std::max(w_buf, grid(outside)));
    while (outside - inside > 1) {
        const int mid = (inside + outside) / 2;
        if (outside_root(f(grid(mid)))) inside = mid;
        else outside = mid;
    }
    double near = grid(inside), far = grid(outside);
    const double tol = root_tolerance * scale;
    for (int it = 0; it < 200 && std::abs(far - near) > tol; ++it) {
        const double mid = 0.5 * (near + far);
        const double fm = f(mid);
        if (!std::isfinite(fm))
            throw RootFindingError("self-energy is not finite inside the bracket", std::min(near, far),
                                   std::max(near, far));
        if (outside_root(fm)) near = mid;
        else far = mid;
    }
    if (std::abs(far - near) > tol)
        throw RootFindingError("bisection did not converge", std::min(near, far), std::max(near, far));
    const double root = 0.5 * (near + far);
    return {root, amplitude(root), false};
}

} // namespace

Tabulated Tabulated::from_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open spectral table " + path.string());
    Tabulated tab;
    std::string line;
    std::getline(in, line);  // header
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        row.imbue(std::locale::classic());
        double w = 0.0, j = 0.0;
        if (!(row >> w >> j))
            throw InvalidArgument(path.string() + ":" + std::to_string(line_no) +
                                  ": expected two numeric columns");
        tab.omega.push_back(w);
        tab.values.push_back(j);
    }
    validate(SpectralDensity{tab});
    return tab;
}

void validate(const SpectralDensity& J)
{
    std::visit(overloaded{
                   [](const OhmicFamily& o) {
                       if (!(o.eta >= 0.0) || !std::isfinite(o.eta))
                           throw InvalidArgument("ohmic eta must be >= 0");
                       if (!(o.s > 0.0) || !std::isfinite(o.s))
                           throw InvalidArgument("ohmic exponent s must be > 0");
                       if (!(o.omega_c > 0.0) || !std::isfinite(o.omega_c))
                           throw InvalidArgument("ohmic omega_c must be > 0");
                   },
                   [](const TightBinding& tb) {
                       if (!(tb.eta >= 0.0) || !std::isfinite(tb.eta))
                           throw InvalidArgument("tight-binding eta must be >= 0");
                       if (!(tb.xi > 0.0) || !std::isfinite(tb.xi))
                           throw InvalidArgument("tight-binding xi must be > 0");
                       if (!std::isfinite(tb.omega_c))
                           throw InvalidArgument("tight-binding omega_c must be finite");
                   },
                   [](const Tabulated& tab) {
                       if (tab.omega.size() < 2 || tab.omega.size() != tab.values.size())
                           throw InvalidArgument("spectral table needs at least two (omega, J) rows");
                       for (std::size_t i = 0; i < tab.omega.size(); ++i) {
                           if (!std::isfinite(tab.omega[i]) || !std::isfinite(tab.values[i]))
                               throw InvalidArgument("spectral table has a non-finite entry");
                           if (tab.values[i] < 0.0)
                               throw InvalidArgument("spectral table has a negative J value");
                           if (i > 0 && !(tab.omega[i] > tab.omega[i - 1]))
                               throw InvalidArgument("spectral table frequencies must increase strictly");
                       }
                   },
               },
               J);
}

void validate(const SystemParams& sys)
{
    if (!(sys.omega_s > 0.0) || !std::isfinite(sys.omega_s))
        throw InvalidArgument("system frequency omega_s must be > 0");
}

void validate(const BathParams& bath, const SpectralDensity& J, Statistics statistics)
{
    if (!(bath.temperature >= 0.0) || !std::isfinite(bath.temperature))
        throw InvalidArgument("temperature must be >= 0");
    if (!std::isfinite(bath.mu)) throw InvalidArgument("chemical potential must be finite");
    if (statistics != Statistics::Boson || is_empty(J)) return;
    const double lo = support(J).lo;
    if (bath.mu < lo) return;
    if (bath.mu == lo && evaluate(J, lo) == 0.0) return;
    throw InvalidArgument("bosonic chemical potential " + std::to_string(bath.mu) +
                          " must lie below the spectral support starting at " + std::to_string(lo));
}

Support support(const SpectralDensity& J)
{
    return std::visit(overloaded{
                          [](const OhmicFamily&) { return Support{}; },
                          [](const TightBinding& tb) {
                              return Support{tb.omega_c - 2.0 * tb.xi, tb.omega_c + 2.0 * tb.xi};
                          },
                          [](const Tabulated& tab) { return Support{tab.omega.front(), tab.omega.back()}; },
                      },
                      J);
}

double integration_cutoff(const SpectralDensity& J)
{
    if (const auto* o = std::get_if<OhmicFamily>(&J)) return o->omega_c * std::max(40.0, 10.0 * o->s);
    return support(J).hi;
}

bool is_empty(const SpectralDensity& J)
{
    return std::visit(overloaded{
                          [](const OhmicFamily& o) { return o.eta == 0.0; },
                          [](const TightBinding& tb) { return tb.eta == 0.0; },
                          [](const Tabulated& tab) {
                              return std::all_of(tab.values.begin(), tab.values.end(),
                                                 [](double v) { return v == 0.0; });
                          },
                      },
                      J);
}

double coupling(const SpectralDensity& J)
{
    if (const auto* o = std::get_if<OhmicFamily>(&J)) return o->eta;
    if (const auto* tb = std::get_if<TightBinding>(&J)) return tb->eta;
    return 1.0;
}

SpectralDensity with_coupling(const SpectralDensity& J, double eta)
{
    return std::visit(overloaded{
                          [eta](OhmicFamily o) -> SpectralDensity {
                              o.eta = eta;
                              return o;
                          },
                          [eta](TightBinding tb) -> SpectralDensity {
                              tb.eta = eta;
                              return tb;
                          },
                          [eta](Tabulated tab) -> SpectralDensity {
                              for (double& v : tab.values) v *= eta;
                              return tab;
                          },
                      },
                      J);
}

double evaluate(const SpectralDensity& J, double omega)
{
    return std::visit(overloaded{
                          [omega](const OhmicFamily& o) { return ohmic_value(o, omega); },
                          [omega](const TightBinding& tb) { return band_value(tb, omega); },
                          [omega](const Tabulated& tab) { return table_value(tab, omega); },
                      },
                      J);
}

Complex memory_kernel(const SpectralDensity& J, double tau)
{
    if (is_empty(J)) return {0.0, 0.0};
    if (const auto* o = std::get_if<OhmicFamily>(&J)) {
        return o->eta * o->omega_c * o->omega_c * std::tgamma(o->s + 1.0) *
               std::pow(Complex(1.0, o->omega_c * tau), -(o->s + 1.0));
    }
    if (const auto* tb = std::get_if<TightBinding>(&J)) {
        const double eta2 = tb->eta * tb->eta;
        const double x = 2.0 * tb->xi * std::abs(tau);
        // J1(x)/x -> 1/2 as x -> 0; the series keeps full precision for tiny arguments.
        const double j1_over_x =
            x < 1e-4 ? 0.5 - x * x / 16.0 : std::cyl_bessel_j(1.0, x) / x;
        return eta2 * 2.0 * tb->xi * tb->xi * j1_over_x * std::polar(1.0, -tb->omega_c * tau);
    }
    return memory_transform(J)(tau);
}

Complex noise_kernel(const SpectralDensity& J, const BathParams& bath, Statistics statistics, double tau)
{
    return noise_transform(J, bath, statistics)(tau);
}

SelfEnergy self_energy(const SpectralDensity& J, double omega)
{
    const Support sup = support(J);
    if (!std::isfinite(omega)) return {0.0, 0.0};
    if (sup.contains(omega))
        throw InvalidArgument("self_energy: frequency " + std::to_string(omega) +
                              " lies inside the spectral support; use density_of_states");
    if (is_empty(J)) return {0.0, 0.0};
    return std::visit(overloaded{
                          [omega](const OhmicFamily& o) { return ohmic_self_energy(o, omega); },
                          [omega](const TightBinding& tb) { return band_self_energy(tb, omega); },
                          [omega](const Tabulated& tab) { return piecewise_linear_hilbert(tab.omega, tab.values, omega); },
                      },
                      J);
}

double edge_self_energy(const SpectralDensity& J, bool upper)
{
    if (is_empty(J)) return 0.0;
    return std::visit(
        overloaded{
            [upper](const OhmicFamily& o) -> double {
                if (upper) throw InvalidArgument("the ohmic support has no upper edge");
                return -o.eta * o.omega_c * std::tgamma(o.s);
            },
            [upper](const TightBinding& tb) -> double {
                return (upper ? 1.0 : -1.0) * tb.eta * tb.eta * tb.xi;
            },
            [upper](const Tabulated& tab) -> double {
                const double edge = upper ? tab.omega.back() : tab.omega.front();
                const double edge_value = upper ? tab.values.back() : tab.values.front();
                if (edge_value > 0.0)
                    return upper ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
                return piecewise_linear_hilbert(tab.omega, tab.values, edge, false).delta;
            },
        },
        J);
}

std::vector<LocalizedMode> localized_modes(const SpectralDensity& J, const SystemParams& sys)
{
    validate(J);
    validate(sys);
    std::vector<LocalizedMode> modes;
    const Support sup = support(J);
    bool found = false;
    const auto lower = find_mode(J, sys, {false, sup.lo}, edge_self_energy(J, false), found);
    if (found) modes.push_back(lower);
    if (std::isfinite(sup.hi)) {
        const auto upper = find_mode(J, sys, {true, sup.hi}, edge_self_energy(J, true), found);
        if (found) modes.push_back(upper);
    }
    return modes;
}

double critical_coupling(const SpectralDensity& J, const SystemParams& sys)
{
    validate(J);
    validate(sys);
    if (const auto* o = std::get_if<OhmicFamily>(&J)) return sys.omega_s / (o->omega_c * std::tgamma(o->s));
    if (const auto* tb = std::get_if<TightBinding>(&J))
        return std::sqrt(2.0 + std::abs(sys.omega_s - tb->omega_c) / tb->xi);
    // A table scaled by lambda has Delta -> lambda Delta; solve each edge condition for lambda.
    const Support sup = support(J);
    if (sys.omega_s <= sup.lo || sys.omega_s >= sup.hi) return 0.0;
    const double d_lo = edge_self_energy(J, false);
    const double d_hi = edge_self_energy(J, true);
    const double lambda_lo = std::isfinite(d_lo) && d_lo < 0.0 ? (sys.omega_s - sup.lo) / -d_lo
                             : std::isfinite(d_lo)             ? std::numeric_limits<double>::infinity()
                                                               : 0.0;
    const double lambda_hi = std::isfinite(d_hi) && d_hi > 0.0 ? (sup.hi - sys.omega_s) / d_hi
                             : std::isfinite(d_hi)             ? std::numeric_limits<double>::infinity()
                                                               : 0.0;
    return std::min(lambda_lo, lambda_hi);
}

double occupation(double epsilon, const BathParams& bath, Statistics statistics)
{
    const double x = epsilon - bath.mu;
    if (statistics == Statistics::Boson) {
        if (!(x > 0.0))
            throw InvalidArgument("bosonic occupation has a pole: energy " + std::to_string(epsilon) +
                                  " is not above the chemical potential " + std::to_string(bath.mu));
        if (bath.temperature == 0.0) return 0.0;
        return 1.0 / std::expm1(x / bath.temperature);
    }
    if (bath.temperature == 0.0) return x < 0.0 ? 1.0 : (x > 0.0 ? 0.0 : 0.5);
    const double y = x / bath.temperature;
    if (y > 0.0) {
        const double e = std::exp(-y);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(y));
}

} // namespace nmqd
