#include "nmqd/oracle.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace nmqd {

double DiscretizedBath::coupling_weight() const
{
    return std::accumulate(couplings.begin(), couplings.end(), 0.0,
                           [](double acc, double g) { return acc + g * g; });
}

DiscretizedBath discretize(const SpectralDensity& J, std::size_t modes)
{
    validate(J);
    if (modes < 2) throw InvalidArgument("a discretized bath needs at least 2 modes");
    DiscretizedBath bath;
    bath.frequencies.resize(modes);
    bath.couplings.resize(modes);
    const double n = static_cast<double>(modes);
    for (std::size_t k = 0; k < modes; ++k) {
        const double x = (static_cast<double>(k) + 0.5) / n;
        double omega = 0.0, width = 0.0;
        if (const auto* ohmic = std::get_if<OhmicFamily>(&J)) {
            const double scale = 2.0 * ohmic->omega_c;
            const double span = -std::expm1(-integration_cutoff(J) / scale);
            omega = -scale * std::log1p(-x * span);
            width = scale * span / (1.0 - x * span) / n;
        } else if (const auto* tb = std::get_if<TightBinding>(&J)) {
            omega = tb->omega_c - 2.0 * tb->xi * std::cos(pi * x);
            width = 2.0 * pi * tb->xi * std::sin(pi * x) / n;
        } else {
            const auto& table = std::get<Tabulated>(J);
            const double lo = table.omega.front(), hi = table.omega.back();
            omega = lo + (hi - lo) * x;
            width = (hi - lo) / n;
        }
        bath.frequencies[k] = omega;
        bath.couplings[k] = std::sqrt(std::max(0.0, evaluate(J, omega)) * width / two_pi);
    }
    return bath;
}

StarEvolution::StarEvolution(const DiscretizedBath& bath, const SystemParams& sys)
    : frequencies_(bath.frequencies)
{
    validate(sys);
    if (bath.couplings.size() != bath.frequencies.size())
        throw InvalidArgument("discretized bath has mismatched frequency and coupling lists");
    const auto dim = static_cast<Eigen::Index>(bath.size() + 1);
    Eigen::MatrixXd hamiltonian = Eigen::MatrixXd::Zero(dim, dim);
    hamiltonian(0, 0) = sys.omega_s;
    for (Eigen::Index k = 1; k < dim; ++k) {
        hamiltonian(k, k) = bath.frequencies[static_cast<std::size_t>(k - 1)];
        hamiltonian(0, k) = hamiltonian(k, 0) = bath.couplings[static_cast<std::size_t>(k - 1)];
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
    if (solver.info() != Eigen::Success) throw Error("star Hamiltonian diagonalization failed");
    energies_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
}

Eigen::VectorXcd StarEvolution::system_row(double t) const
{
    // [exp(-iHt)]_{0k} = sum_j V_0j V_kj exp(-i E_j t)
    const Eigen::Index dim = energies_.size();
    Eigen::VectorXcd weights(dim);
    for (Eigen::Index j = 0; j < dim; ++j) weights(j) = vectors_(0, j) * std::polar(1.0, -energies_(j) * t);
    return vectors_ * weights;
}

Complex StarEvolution::u(double t) const
{
    Complex sum = 0.0;
    for (Eigen::Index j = 0; j < energies_.size(); ++j)
        sum += vectors_(0, j) * vectors_(0, j) * std::polar(1.0, -energies_(j) * t);
    return sum;
}

double StarEvolution::v(double t, const BathParams& bath, Statistics statistics) const
{
    const Eigen::VectorXcd row = system_row(t);
    double sum = 0.0;
    for (std::size_t k = 0; k < frequencies_.size(); ++k)
        sum += std::norm(row(static_cast<Eigen::Index>(k + 1))) * occupation(frequencies_[k], bath, statistics);
    return sum;
}

Complex exact_u(const DiscretizedBath& bath, const SystemParams& sys, double t)
{
    return StarEvolution(bath, sys).u(t);
}

double exact_v(const DiscretizedBath& bath, const SystemParams& sys, const BathParams& bath_params,
               Statistics statistics, double t)
{
    return StarEvolution(bath, sys).v(t, bath_params, statistics);
}

PropagatorTrace exact_u_trace(const DiscretizedBath& bath, const SystemParams& sys, const TimeGrid& grid)
{
    grid.validate();
    const StarEvolution evolution(bath, sys);
    PropagatorTrace out{grid, std::vector<Complex>(grid.size()), sys.omega_s};
    for (std::size_t i = 0; i < grid.size(); ++i) out.u[i] = evolution.u(grid.time(i) - grid.t0);
    return out;
}

CorrelationTrace exact_v_trace(const DiscretizedBath& bath, const SystemParams& sys,
                               const BathParams& bath_params, const TimeGrid& grid)
{
    grid.validate();
    const StarEvolution evolution(bath, sys);
    CorrelationTrace out{grid, std::vector<double>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.v[i] = evolution.v(grid.time(i) - grid.t0, bath_params, sys.statistics);
    return out;
}

} // namespace nmqd
