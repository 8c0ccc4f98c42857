#include "kg/td_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kg/kernels.hpp"
#include "kg/maximizer.hpp"
#include "kg/quadrature.hpp"
#include "kg/tridiag.hpp"

namespace kg {

void TdConfig::validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("TdConfig: tau must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("TdConfig: horizon must be positive");
    if (!(r > 0.0)) throw std::invalid_argument("TdConfig: r must be positive");
    if (nu < 0.0) throw std::invalid_argument("TdConfig: nu must be nonnegative");
    if (!(outer_tol > 0.0)) throw std::invalid_argument("TdConfig: outer_tol must be positive");
    if (max_outer < 1) throw std::invalid_argument("TdConfig: max_outer must be at least 1");
}

std::size_t TdConfig::n_steps() const {
    return static_cast<std::size_t>(std::llround(horizon / tau));
}

namespace {

// Implicit operator of the Boltzmann step: (1/tau) I - nu * D with D the
// conservative central difference of d_zz(z^2 f). Half-cell closures at both
// ends make the trapezoid-weighted column sums of D vanish, so the diffusion
// conserves trapezoid mass to round-off.
Tridiagonal boltzmann_matrix(const TdConfig& cfg) {
    const std::size_t n = cfg.grid.n_nodes();
    const double h = cfg.grid.spacing();
    const double c = cfg.nu / (h * h);
    Tridiagonal m(n);
    auto z2 = [&](std::size_t i) {
        const double z = cfg.grid.node(i);
        return z * z;
    };
    for (std::size_t i = 0; i < n; ++i) m.diag[i] = 1.0 / cfg.tau;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        m.diag[i] += 2.0 * c * z2(i);
        m.upper[i] = -c * z2(i + 1);
        m.lower[i] = -c * z2(i - 1);
    }
    m.diag[0] += 2.0 * c * z2(0);
    m.upper[0] = -2.0 * c * z2(1);
    m.diag[n - 1] += 2.0 * c * z2(n - 1);
    m.lower[n - 1] = -2.0 * c * z2(n - 2);
    return m;
}

Tridiagonal hjb_matrix(const TdConfig& cfg) {
    const std::size_t n = cfg.grid.n_nodes();
    const double h = cfg.grid.spacing();
    const double c = cfg.nu / (h * h);
    Tridiagonal m(n);
    auto z2 = [&](std::size_t i) {
        const double z = cfg.grid.node(i);
        return z * z;
    };
    for (std::size_t i = 0; i < n; ++i) m.diag[i] = 1.0 / cfg.tau + cfg.r;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        m.diag[i] += 2.0 * c * z2(i);
        m.upper[i] = -c * z2(i);
        m.lower[i] = -c * z2(i);
    }
    // Neumann rows via ghost reflection
    m.diag[0] += 2.0 * c * z2(0);
    m.upper[0] = -2.0 * c * z2(0);
    m.diag[n - 1] += 2.0 * c * z2(n - 1);
    m.lower[n - 1] = -2.0 * c * z2(n - 1);
    return m;
}

std::vector<double> alpha_of(const PolicyProfile& s, const LearningFunction& lf) {
    std::vector<double> a(s.values.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = lf.alpha(s.values[i]);
    return a;
}

} // namespace

DensityProfile boltzmann_step(const DensityProfile& f, const PolicyProfile& s,
                              const TdConfig& cfg) {
    cfg.validate();
    if (f.grid != cfg.grid || s.grid != cfg.grid)
        throw std::invalid_argument("boltzmann_step: profile grids do not match the config");
    require_aligned(cfg.grid, f.values.size(), "boltzmann_step");
    require_aligned(cfg.grid, s.values.size(), "boltzmann_step");

    const std::vector<double> as = alpha_of(s, cfg.lf);
    std::vector<double> rhs =
        kernels::collision_rhs(f.values, as, cfg.grid.spacing(), /*antisym_boundary=*/true);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += f.values[i] / cfg.tau;

    const Tridiagonal m = boltzmann_matrix(cfg);
    return DensityProfile{cfg.grid, solve_tridiagonal(m, rhs), f.normalized};
}

ValueProfile hjb_step_backward(const ValueProfile& v_next, const DensityProfile& f_next,
                               const PolicyProfile& s_next, const TdConfig& cfg) {
    cfg.validate();
    if (v_next.grid != cfg.grid || f_next.grid != cfg.grid || s_next.grid != cfg.grid)
        throw std::invalid_argument("hjb_step_backward: profile grids do not match the config");

    const double h = cfg.grid.spacing();
    const std::vector<double> b = kernels::b_values(v_next.values, f_next.values, h);
    std::vector<double> rhs(cfg.grid.n_nodes());
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        const double z = cfg.grid.node(i);
        const double si = s_next.values[i];
        const double ham = (1.0 - si) * z + cfg.lf.alpha(si) * b[i];
        rhs[i] = v_next.values[i] / cfg.tau + ham;
    }
    const Tridiagonal m = hjb_matrix(cfg);
    return ValueProfile{cfg.grid, solve_tridiagonal(m, rhs)};
}

TdTrace run_td(const TdConfig& cfg, const DensityProfile& f0) {
    cfg.validate();
    if (f0.grid != cfg.grid) throw std::invalid_argument("run_td: f0 grid mismatch");
    require_aligned(cfg.grid, f0.values.size(), "run_td");

    const std::size_t n = cfg.grid.n_nodes();
    const std::size_t steps = cfg.n_steps();
    const double h = cfg.grid.spacing();
    const std::size_t stride =
        cfg.snapshot_stride > 0 ? cfg.snapshot_stride : (steps + 199) / 200;

    const Tridiagonal boltz_m = boltzmann_matrix(cfg);
    const Tridiagonal hjb_m = hjb_matrix(cfg);
    const std::vector<double> zs = cfg.grid.nodes();

    // Full time history of f and S; V is rolled through the backward sweep.
    std::vector<std::vector<double>> f_all(steps + 1, std::vector<double>(n));
    std::vector<std::vector<double>> s_all(steps + 1, std::vector<double>(n, 0.0));
    f_all[0] = f0.values;

    TdTrace trace;
    trace.times.resize(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) trace.times[k] = static_cast<double>(k) * cfg.tau;

    std::vector<std::size_t> snap_idx;
    for (std::size_t k = 0; k <= steps; k += stride) snap_idx.push_back(k);
    if (snap_idx.back() != steps) snap_idx.push_back(steps);
    std::vector<std::vector<double>> v_snaps(snap_idx.size(), std::vector<double>(n, 0.0));

    int outer = 0;
    bool converged = false;
    for (outer = 1; outer <= cfg.max_outer; ++outer) {
        // (1) forward Boltzmann sweep with the current policy
        for (std::size_t k = 0; k < steps; ++k) {
            const std::vector<double> as = alpha_of({cfg.grid, s_all[k]}, cfg.lf);
            std::vector<double> rhs = kernels::collision_rhs(f_all[k], as, h, true);
            for (std::size_t i = 0; i < n; ++i) rhs[i] += f_all[k][i] / cfg.tau;
            f_all[k + 1] = solve_tridiagonal(boltz_m, rhs);
        }
        // (2)+(3) backward sweep: solve V^k, then refresh S^k from (V^k, f^k)
        std::vector<double> v(n, 0.0); // terminal condition V(.,T) = 0
        double ds = 0.0;
        auto update_policy = [&](std::size_t k) {
            const std::vector<double> b = kernels::b_values(v, f_all[k], h);
            std::vector<double> snew(n);
            kernels::policy_map(zs, b, cfg.lf, snew);
            for (std::size_t i = 0; i < n; ++i)
                ds = std::max(ds, std::abs(snew[i] - s_all[k][i]));
            s_all[k] = std::move(snew);
        };
        auto maybe_snap_v = [&](std::size_t k) {
            for (std::size_t j = 0; j < snap_idx.size(); ++j)
                if (snap_idx[j] == k) v_snaps[j] = v;
        };
        update_policy(steps);
        maybe_snap_v(steps);
        for (std::size_t k = steps; k-- > 0;) {
            const std::vector<double> b = kernels::b_values(v, f_all[k + 1], h);
            std::vector<double> rhs(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double si = s_all[k + 1][i];
                rhs[i] = v[i] / cfg.tau + (1.0 - si) * zs[i] + cfg.lf.alpha(si) * b[i];
            }
            v = solve_tridiagonal(hjb_m, rhs);
            update_policy(k);
            maybe_snap_v(k);
        }
        // The first pass starts from V = 0, where the policy is trivially
        // unchanged; only accept convergence once V has been swept.
        if (outer >= 2 && ds < cfg.outer_tol) {
            converged = true;
            break;
        }
    }
    trace.converged = converged;
    trace.outer_iterations = std::min(outer, cfg.max_outer);

    trace.production.resize(steps + 1);
    trace.total_mass.resize(steps + 1);
    std::vector<double> integrand(n);
    double min_density = 0.0;
    for (std::size_t k = 0; k <= steps; ++k) {
        for (std::size_t i = 0; i < n; ++i)
            integrand[i] = (1.0 - s_all[k][i]) * zs[i] * f_all[k][i];
        trace.production[k] = trapezoid(integrand, h);
        trace.total_mass[k] = trapezoid(f_all[k], h);
        min_density = std::min(min_density, min_value(f_all[k]));
    }
    trace.min_density = min_density;

    trace.snapshot_times.reserve(snap_idx.size());
    bool policy_monotone = true;
    for (std::size_t j = 0; j < snap_idx.size(); ++j) {
        const std::size_t k = snap_idx[j];
        trace.snapshot_times.push_back(trace.times[k]);
        trace.f_snapshots.push_back({cfg.grid, f_all[k], f0.normalized});
        trace.v_snapshots.push_back({cfg.grid, v_snaps[j]});
        trace.s_snapshots.push_back({cfg.grid, s_all[k]});
        policy_monotone = policy_monotone && is_nonincreasing(s_all[k], tol::num_tol);
    }
    trace.policy_monotone = policy_monotone;
    return trace;
}

} // namespace kg
