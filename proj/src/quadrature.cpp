#include "nmqd/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace nmqd::quad {

const KronrodTable& kronrod31()
{
    static const KronrodTable table = [] {
        using boost::math::quadrature::gauss;
        using boost::math::quadrature::gauss_kronrod;
        const auto& xk = gauss_kronrod<double, 31>::abscissa();
        const auto& wk = gauss_kronrod<double, 31>::weights();
        const auto& xg = gauss<double, 15>::abscissa();
        const auto& wg = gauss<double, 15>::weights();
        KronrodTable t{};
        for (std::size_t i = 0; i < 16; ++i) {
            t.nodes[i] = xk[i];
            t.kronrod_weights[i] = wk[i];
        }
        for (std::size_t i = 0; i < 8; ++i) {
            if (std::abs(xg[i] - xk[2 * i]) > 1e-14)
                throw Error("unexpected Gauss-Kronrod node layout");
            t.gauss_weights[i] = wg[i];
        }
        return t;
    }();
    return table;
}

std::vector<double> geometric_breaks(double origin, double first, double last, double factor)
{
    std::vector<double> out;
    if (!(first > 0.0) || !(last > first) || !(factor > 1.0)) return out;
    for (double d = first; d < last; d *= factor) out.push_back(origin + d);
    return out;
}

const UnitRule& gauss_legendre6()
{
    static const UnitRule rule = [] {
        using boost::math::quadrature::gauss;
        const auto& x = gauss<double, 6>::abscissa();
        const auto& w = gauss<double, 6>::weights();
        UnitRule r{};
        // Boost stores the three positive abscissae of the symmetric rule.
        for (std::size_t i = 0; i < 3; ++i) {
            r.nodes[i] = 0.5 * (1.0 - x[2 - i]);
            r.weights[i] = 0.5 * w[2 - i];
            r.nodes[5 - i] = 0.5 * (1.0 + x[2 - i]);
            r.weights[5 - i] = 0.5 * w[2 - i];
        }
        return r;
    }();
    return rule;
}

} // namespace nmqd::quad
