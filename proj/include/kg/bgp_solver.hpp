#pragma once

#include <optional>
#include <utility>

#include "kg/learning.hpp"
#include "kg/maximizer.hpp"
#include "kg/profiles.hpp"

namespace kg {

struct BgpConfig {
    UniformGrid grid;
    double nu = 0.0;
    double r = 0.1;
    LearningFunction lf = LearningFunction::power(0.005, 0.5);
    double theta = 0.0;   ///< tail exponent parameter; required iff nu == 0
    double k_tail = 0.0;  ///< Pareto tail coefficient anchoring the nu=0 branch; required iff nu == 0
    double omega = 0.75;  ///< damping weight for the fixed-point blend
    double fp_tol = 1e-8;
    int max_iters = 5000;
    double eps_hjb = 0.0; ///< advection offset gamma*(x+eps) in the v-rows

    // nu=0 transform-solve controls
    double ktr_step = 2e-3;
    double ktr_xtilde_max = 4000.0;

    void validate() const;
};

struct BgpResiduals {
    double boltzmann = 0.0;        ///< row-relative phi defect net of the constraint force
    double hjb = 0.0;              ///< row defect of the v equation
    double gamma_defect = 0.0;     ///< |gamma - update_formula(S, phi)|
    double constraint_force = 0.0; ///< fitted Lagrange multiplier of the mass row (nu > 0);
                                   ///< balances the tail mass flux of the truncated domain
};

struct BgpSolution {
    DensityProfile phi;
    CdfProfile cdf;   ///< nu=0: exact transform evaluation; nu>0: cumulative trapezoid
    ValueProfile v;
    PolicyProfile s;
    double gamma = 0.0;
    ThresholdPoint x0{0.0};
    BgpResiduals residuals;
    bool converged = false;
    bool degenerate = false;
    int iterations = 0;
};

/// One phi update for nu > 0: the stencil rows with phi_0 = 0, a one-sided
/// no-flux row at x_max, and the trapezoid-mass constraint coupled through a
/// Lagrange border. Collision terms are assembled from (phi_prev, S_prev).
DensityProfile bgp_phi_step(const DensityProfile& phi_prev, const PolicyProfile& s_prev,
                            double gamma_prev, const BgpConfig& cfg);

/// One v update: upwind backward differences for gamma (x+eps) v', implicit
/// diffusion -nu x^2 v'', Neumann rows v'(0) = v'(x_max) = 0, right side
/// (1-S)x + alpha(S) B(phi_new, v_prev).
ValueProfile bgp_v_step(const DensityProfile& phi_new, const ValueProfile& v_prev,
                        const PolicyProfile& s_prev, double gamma_prev, const BgpConfig& cfg);

/// Fresh maximizer from B(v_new, phi_new) plus the growth-rate update:
/// gamma = 2 sqrt(nu * T[alpha(S) phi]) for nu > 0, theta * T[alpha(S) phi] for nu = 0.
std::pair<PolicyProfile, double> policy_gamma_update(const DensityProfile& phi_new,
                                                     const ValueProfile& v_new,
                                                     const BgpConfig& cfg);

/// Damped fixed-point iteration over (phi, v, S, gamma). For nu = 0 the phi
/// update solves the transformed tail-anchored equation (see ktransform)
/// instead of the x-space linear system, which is non-unique in the tail
/// coefficient on a truncated domain.
BgpSolution run_bgp(const BgpConfig& cfg,
                    std::optional<DensityProfile> phi_init = std::nullopt,
                    std::optional<ValueProfile> v_init = std::nullopt);

} // namespace kg
