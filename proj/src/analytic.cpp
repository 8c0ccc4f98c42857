#include "kg/analytic.hpp"

#include <cmath>
#include <stdexcept>

#include "kg/quadrature.hpp"

namespace kg {

ConstantAlphaBgp constant_alpha_bgp(double alpha0, const ParetoParams& p,
                                    const UniformGrid& grid) {
    if (!(alpha0 > 0.0))
        throw std::invalid_argument("constant_alpha_bgp: alpha0 must be positive");
    CdfProfile cdf{grid, std::vector<double>(grid.n_nodes())};
    cdf.values[0] = 0.0; // continuous extension of the formula at x = 0
    for (std::size_t i = 1; i < cdf.values.size(); ++i) {
        const double x = grid.node(i);
        cdf.values[i] = 1.0 / (1.0 + p.k * std::pow(x, -1.0 / p.theta));
    }
    return {alpha0 * p.theta, std::move(cdf)};
}

DensityProfile constant_alpha_density(const ParetoParams& p, const UniformGrid& grid) {
    DensityProfile phi{grid, std::vector<double>(grid.n_nodes()), false};
    phi.values[0] = 0.0;
    for (std::size_t i = 1; i < phi.values.size(); ++i) {
        const double x = grid.node(i);
        const double xp = std::pow(x, -1.0 / p.theta);
        const double den = 1.0 + p.k * xp;
        phi.values[i] = (p.k / p.theta) * xp / x / (den * den);
    }
    return phi;
}

double logistic_cdf(double f0, double alpha0, double t) {
    if (!(f0 >= 0.0 && f0 <= 1.0))
        throw std::invalid_argument("logistic_cdf: F0 must lie in [0,1]");
    if (t < 0.0) throw std::invalid_argument("logistic_cdf: t must be nonnegative");
    const double e = std::exp(-alpha0 * t);
    return f0 * e / (1.0 - f0 + f0 * e);
}

double kpp_wave_speed(double nu, double alpha0) {
    if (nu < 0.0) throw std::invalid_argument("kpp_wave_speed: nu must be nonnegative");
    if (!(alpha0 > 0.0)) throw std::invalid_argument("kpp_wave_speed: alpha0 must be positive");
    return 2.0 * std::sqrt(nu * alpha0);
}

} // namespace kg
