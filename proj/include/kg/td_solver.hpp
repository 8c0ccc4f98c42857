#pragma once

#include <cstddef>
#include <vector>

#include "kg/learning.hpp"
#include "kg/profiles.hpp"

namespace kg {

struct TdConfig {
    UniformGrid grid;
    double tau = 0.05;       ///< time step
    double horizon = 100.0;  ///< final time T
    double nu = 0.0;         ///< diffusivity of the geometric noise
    double r = 0.05;         ///< discount rate
    LearningFunction lf = LearningFunction::power(0.075, 0.3);
    double outer_tol = 1e-6; ///< sup-norm policy change across sweeps
    int max_outer = 200;
    std::size_t snapshot_stride = 0; ///< 0 = ceil(n_steps/200)
    double mass_tol = 1e-8;          ///< reported-conservation budget

    void validate() const;
    std::size_t n_steps() const;
};

/// Trace of a forward-backward run: dense Y(t)/mass(t) series plus profile
/// snapshots at the configured cadence.
struct TdTrace {
    std::vector<double> snapshot_times;
    std::vector<DensityProfile> f_snapshots;
    std::vector<ValueProfile> v_snapshots;
    std::vector<PolicyProfile> s_snapshots;
    std::vector<double> times;      ///< every time level
    std::vector<double> production; ///< Y(t_k) = T[(1-S) z f]
    std::vector<double> total_mass; ///< trapezoid mass at every level
    bool converged = false;
    int outer_iterations = 0;
    double min_density = 0.0;           ///< most negative node value seen
    bool policy_monotone = true;        ///< S(.,t_k) non-increasing at snapshots
};

/// One semi-implicit Boltzmann step: implicit conservative diffusion of
/// -nu d_zz(z^2 f), explicit collision right side from (f^k, S^k).
DensityProfile boltzmann_step(const DensityProfile& f, const PolicyProfile& s,
                              const TdConfig& cfg);

/// One backward HJB step: solves for V^k from V^{k+1} with implicit diffusion
/// and discounting, Hamiltonian assembled from (S^{k+1}, f^{k+1}, V^{k+1}),
/// homogeneous Neumann rows at both ends.
ValueProfile hjb_step_backward(const ValueProfile& v_next, const DensityProfile& f_next,
                               const PolicyProfile& s_next, const TdConfig& cfg);

/// Outer forward-backward iteration until the policy stops changing:
/// forward f-sweep with the current S, then one backward sweep updating V and
/// re-optimizing S at each time level from the fresh (V^k, f^k).
TdTrace run_td(const TdConfig& cfg, const DensityProfile& f0);

} // namespace kg
