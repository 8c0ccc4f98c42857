#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kg/bgp_solver.hpp"
#include "kg/kpp.hpp"
#include "kg/td_solver.hpp"

namespace kg {

/// Least-squares exponential-rate fit of a production series.
struct GrowthReport {
    double gamma_hat = 0.0;
    double t_a = 0.0, t_b = 0.0; ///< fit window
    double r_squared = 0.0;
    bool monotone = false; ///< Y non-decreasing on the window
    bool fit_valid = false;
};

/// Power-law tail fit of 1 - Phi.
struct ParetoFit {
    double theta_hat = 0.0;
    double k_hat = 0.0;
    double x_a = 0.0, x_b = 0.0;
    double residual = 0.0; ///< rms residual of the log-log regression
};

struct DegeneracyReport {
    bool degenerate = false;
    double low_mass_fraction = 0.0;  ///< mass in the first 5% of the grid
    bool production_decreasing = false; ///< Y strictly decreasing on the last quarter
    double gamma = 0.0;              ///< BGP context only (NaN otherwise)
};

/// Y_k = T[(1-S_k) z f_k] for each snapshot pair of the trace.
std::vector<double> production_series(const TdTrace& trace);

/// Constant Y0 = T[(1-S) x phi]; along the BGP, Y(t) = e^{gamma t} Y0.
double production_level(const BgpSolution& sol);

/// Slope of log Y against t over the trailing window (default last 25%).
/// Nonpositive Y inside the window yields fit_valid = false instead of a fit.
GrowthReport growth_rate_fit(std::span<const double> y, std::span<const double> t,
                             double window_fraction = 0.25);

/// Regression of log(1-Phi) on log x: theta_hat = -1/slope, k_hat = e^intercept.
/// Default window: the top decade of x where 1-Phi lies in [1e-6, 1e-1].
/// Throws std::invalid_argument when the window holds fewer than 10 samples.
ParetoFit pareto_fit(std::span<const double> x, std::span<const double> cdf,
                     std::optional<std::pair<double, double>> window = std::nullopt);
ParetoFit pareto_fit(const CdfProfile& cdf,
                     std::optional<std::pair<double, double>> window = std::nullopt);

DegeneracyReport degeneracy_check(const TdTrace& trace);
DegeneracyReport degeneracy_check(const BgpSolution& sol);

/// Front position y*(t) at the level crossing per snapshot (linear
/// interpolation), least-squares slope over the second half of the run.
/// Throws std::runtime_error naming the snapshot index when a snapshot is
/// not a monotone front.
double front_speed(const KppTrace& trace, double level = 0.5);

/// One named invariant check outcome (used by reports and the acceptance suite).
struct InvariantResult {
    std::string name;
    bool pass;
    double measured;
    double threshold;
};

/// The structural BGP invariant suite: mass defect, v monotone, dv/h bounds,
/// S monotone, v constant on [0,x0], v >= x/r (gamma < r), gamma consistency,
/// and gamma/theta <= alpha(1) for nu = 0.
std::vector<InvariantResult> check_bgp_invariants(const BgpSolution& sol, const BgpConfig& cfg);

} // namespace kg
