#pragma once

#include <span>

#include "kg/learning.hpp"
#include "kg/profiles.hpp"

namespace kg {

enum class ControlRegime {
    ZeroB,     ///< B <= 0: no gain from learning, s = 0
    Saturated, ///< B alpha'(1) >= x: full-time learning, s = 1
    Interior   ///< 0 < B alpha'(1) < x: alpha'(s) = x/B
};

struct ControlCase {
    ControlRegime regime;
    double s;
};

/// Pointwise maximizer of s -> (1-s) x + alpha(s) B over [0,1].
/// Interior case in closed form for the power law: s = (alpha0 n B / x)^{1/(1-n)}.
/// Throws std::domain_error for x < 0.
ControlCase optimal_control(double x, double b, const LearningFunction& lf);

/// Same maximizer with the interior root found by safeguarded bisection on
/// alpha'(s) = x/B; works for any strictly concave alpha. Tolerance in s.
ControlCase optimal_control_bisect(double x, double b, const LearningFunction& lf,
                                   double s_tol = 1e-12);

/// Nodewise application of optimal_control along the grid.
PolicyProfile policy_from_b(std::span<const double> b, const UniformGrid& grid,
                            const LearningFunction& lf);

/// Threshold knowledge level: S = 1 on [0, x0), S < 1 beyond.
struct ThresholdPoint {
    double x0;
};

/// Root of g(x) = B(x) alpha'(1) - x, B linearly interpolated between nodes;
/// bisection on the first bracketing cell from the left. Returns x0 = 0 when
/// g(0) <= 0 and x0 = x_max when g stays positive on the whole grid.
ThresholdPoint find_x0(std::span<const double> b, const UniformGrid& grid,
                       const LearningFunction& lf);

} // namespace kg
