#include "kg/maximizer.hpp"

#include <cmath>
#include <stdexcept>

#include "kg/kernels.hpp"

namespace kg {

ControlCase optimal_control(double x, double b, const LearningFunction& lf) {
    if (x < 0.0) throw std::domain_error("optimal_control: x must be nonnegative");
    if (!(b <= 0.0) && !(b >= 0.0))
        throw std::domain_error("optimal_control: B must be finite");
    if (b <= 0.0) return {ControlRegime::ZeroB, 0.0};
    if (lf.is_constant()) {
        // objective (1-s)x + alpha0 B: flat at x = 0, strictly decreasing otherwise
        if (x == 0.0) return {ControlRegime::Saturated, 1.0};
        return {ControlRegime::ZeroB, 0.0};
    }
    const double ap1 = lf.alpha_prime(1.0);
    if (b * ap1 >= x) return {ControlRegime::Saturated, 1.0};
    // 0 < B alpha'(1) < x: alpha'(s) = x/B, closed form for the power law
    const double n = lf.exponent();
    const double s = std::pow(lf.alpha0() * n * b / x, 1.0 / (1.0 - n));
    return {ControlRegime::Interior, s};
}

ControlCase optimal_control_bisect(double x, double b, const LearningFunction& lf,
                                   double s_tol) {
    if (x < 0.0) throw std::domain_error("optimal_control_bisect: x must be nonnegative");
    if (b <= 0.0) return {ControlRegime::ZeroB, 0.0};
    const double ap1 = lf.alpha_prime(1.0);
    if (b * ap1 >= x) return {ControlRegime::Saturated, 1.0};
    // alpha'(s) - x/B is decreasing (alpha concave), +inf at 0, < 0 at 1
    double lo = 0.0, hi = 1.0;
    const double target = x / b;
    while (hi - lo > s_tol) {
        const double mid = 0.5 * (lo + hi);
        if (lf.alpha_prime(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return {ControlRegime::Interior, 0.5 * (lo + hi)};
}

PolicyProfile policy_from_b(std::span<const double> b, const UniformGrid& grid,
                            const LearningFunction& lf) {
    require_aligned(grid, b.size(), "policy_from_b");
    PolicyProfile s{grid, std::vector<double>(grid.n_nodes())};
    const std::vector<double> xs = grid.nodes();
    kernels::policy_map(xs, b, lf, s.values);
    return s;
}

ThresholdPoint find_x0(std::span<const double> b, const UniformGrid& grid,
                       const LearningFunction& lf) {
    require_aligned(grid, b.size(), "find_x0");
    const double ap1 = lf.alpha_prime(1.0);
    auto g = [&](std::size_t i) { return b[i] * ap1 - grid.node(i); };
    if (!(g(0) > 0.0)) return {0.0};
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        const double gi = g(i), gj = g(i + 1);
        if (gi >= 0.0 && gj < 0.0) {
            // bisection on the linear interpolant of B within the cell
            double lo = grid.node(i), hi = grid.node(i + 1);
            const double h = grid.spacing();
            auto gx = [&](double x) {
                const double t = (x - grid.node(i)) / h;
                return ((1.0 - t) * b[i] + t * b[i + 1]) * ap1 - x;
            };
            for (int it = 0; it < 200 && hi - lo > 1e-15 * grid.x_max; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (gx(mid) >= 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            return {0.5 * (lo + hi)};
        }
    }
    return {grid.x_max}; // S saturated on the whole grid
}

} // namespace kg
