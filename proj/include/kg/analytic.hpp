#pragma once

#include <stdexcept>

#include "kg/profiles.hpp"

namespace kg {

/// Pareto tail indices of the initial distribution: 1 - F ~ k x^{-1/theta}.
/// theta < 1 is required for the value function to stay sublinear.
struct ParetoParams {
    double k;
    double theta;

    ParetoParams(double k_, double theta_) : k(k_), theta(theta_) {
        if (!(k > 0.0)) throw std::invalid_argument("ParetoParams: k must be positive");
        if (!(theta > 0.0 && theta < 1.0))
            throw std::invalid_argument("ParetoParams: theta must lie in (0,1)");
    }
};

struct ConstantAlphaBgp {
    double gamma;
    CdfProfile cdf;
};

/// Closed-form BGP for a constant learning function:
///   gamma = alpha0 * theta,  Phi(x) = 1 / (1 + k x^{-1/theta}),  Phi(0) = 0.
ConstantAlphaBgp constant_alpha_bgp(double alpha0, const ParetoParams& p,
                                    const UniformGrid& grid);

/// Density of the constant-alpha member: phi = Phi' in closed form, phi(0) = 0.
DensityProfile constant_alpha_density(const ParetoParams& p, const UniformGrid& grid);

/// Pointwise solution of dF/dt = -alpha0 F (1-F):
///   F(t) = F0 e^{-alpha0 t} / (1 - F0 + F0 e^{-alpha0 t}).
double logistic_cdf(double f0, double alpha0, double t);

/// Minimal Fisher-KPP traveling-wave speed 2 sqrt(nu alpha0).
double kpp_wave_speed(double nu, double alpha0);

} // namespace kg
