#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kg/learning.hpp"
#include "kg/profiles.hpp"

namespace kg {

/// Solution of the transformed Boltzmann equation in xt = x^{-1/theta}:
///   xt K' = -K * I(xt),   I(xt) = integral_0^xt alpha(S~)(K xi)' dxi,
/// integrated as an initial-value problem from K(0) = k_tilde. The running
/// constraint integral I is carried alongside; (K xt)' = K (1 - I).
struct KProfile {
    double xtilde_max = 0.0;
    std::size_t n_cells = 0;
    double k_tilde = 0.0;
    double theta = 0.0;
    std::vector<double> k_values;   ///< K at the xt nodes
    std::vector<double> constraint; ///< I at the xt nodes
    std::vector<double> alpha_s;    ///< alpha(S~) sampled at the xt nodes
    double xtilde0 = 0.0;           ///< first node where S~ reaches 1 (inf -> xtilde_max)

    double step() const { return xtilde_max / static_cast<double>(n_cells); }
    double node(std::size_t i) const { return static_cast<double>(i) * step(); }
};

/// Integrates the K-equation with a 4th-order explicit scheme; the removable
/// singularity at xt = 0 is handled by a series first step with
/// K'(0) = -alpha(S~(0)) k_tilde^2. `alpha_s_tilde` samples alpha(S~) at the
/// xt nodes and must be non-decreasing (S~ non-decreasing in xt).
/// Profile invariants (K non-increasing, 0 < K <= k_tilde, (K xi)' >= 0,
/// I <= 1) are asserted during integration; violations beyond 1e-8 throw
/// with the offending position.
KProfile solve_k(double k_tilde, std::span<const double> alpha_s_tilde, double theta,
                 double xtilde_max, std::size_t n_cells);

/// theta / lim xt K(xt), the limit Richardson-extrapolated over the last
/// three dyadic tail points. Throws when the extrapolation has not saturated
/// (|R1-R2|/|R1| >= 1e-4), suggesting a larger xtilde_max. When S~ reaches 1,
/// asserts alpha(1) >= gamma/theta >= 1/(k_tilde xt0 + 1/alpha(1)).
double gamma_from_k(const KProfile& kp);

/// Limit of xt K(xt) by the same extrapolation (exposed for diagnostics).
double xtk_limit(const KProfile& kp);

/// Phi(x) = 1 - (gamma/theta) K(xt) xt at xt = x^{-1/theta}, resampled onto
/// the x grid by monotone interpolation; x below the covered range uses the
/// saturated limit (Phi -> 0). Throws std::domain_error for gamma <= 0.
CdfProfile phi_from_k(const KProfile& kp, double gamma, const UniformGrid& xgrid);

/// Density on the x grid in closed form from the ODE state:
///   phi(x) = (gamma/theta^2) K(xt) (1 - I(xt)) x^{-1/theta - 1}.
DensityProfile density_from_k(const KProfile& kp, double gamma, const UniformGrid& xgrid);

/// Maps a policy on the x grid into alpha(S~) samples on the xt grid
/// (S~(xt) = S(xt^{-theta})), for feeding a coupled solver's S into solve_k.
std::vector<double> policy_alpha_to_xtilde(const PolicyProfile& s, const LearningFunction& lf,
                                           double theta, double xtilde_max,
                                           std::size_t n_cells);

} // namespace kg
