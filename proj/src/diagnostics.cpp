#include "kg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "kg/quadrature.hpp"

namespace kg {

namespace {

struct LineFit {
    double slope, intercept, r_squared, rms_residual;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double d = static_cast<double>(n) * sxx - sx * sx;
    const double slope = (static_cast<double>(n) * sxy - sx * sy) / d;
    const double intercept = (sy - slope * sx) / static_cast<double>(n);
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double fit = slope * x[i] + intercept;
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    const double r2 = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    return {slope, intercept, r2, std::sqrt(ss_res / static_cast<double>(n))};
}

} // namespace

std::vector<double> production_series(const TdTrace& trace) {
    std::vector<double> y(trace.f_snapshots.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        const auto& f = trace.f_snapshots[k];
        const auto& s = trace.s_snapshots[k];
        std::vector<double> integrand(f.values.size());
        for (std::size_t i = 0; i < integrand.size(); ++i)
            integrand[i] = (1.0 - s.values[i]) * f.grid.node(i) * f.values[i];
        y[k] = trapezoid(integrand, f.grid.spacing());
    }
    return y;
}

double production_level(const BgpSolution& sol) {
    std::vector<double> integrand(sol.phi.values.size());
    for (std::size_t i = 0; i < integrand.size(); ++i)
        integrand[i] = (1.0 - sol.s.values[i]) * sol.phi.grid.node(i) * sol.phi.values[i];
    return trapezoid(integrand, sol.phi.grid.spacing());
}

GrowthReport growth_rate_fit(std::span<const double> y, std::span<const double> t,
                             double window_fraction) {
    if (y.size() != t.size() || y.size() < 4)
        throw std::invalid_argument("growth_rate_fit: need matched series of at least 4 samples");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw std::invalid_argument("growth_rate_fit: window fraction must lie in (0,1]");
    const std::size_t begin =
        y.size() - std::max<std::size_t>(3, static_cast<std::size_t>(
                                                std::ceil(window_fraction * y.size())));
    GrowthReport rep;
    rep.t_a = t[begin];
    rep.t_b = t[y.size() - 1];
    rep.monotone = true;
    for (std::size_t k = begin + 1; k < y.size(); ++k)
        if (y[k] < y[k - 1]) rep.monotone = false;
    std::vector<double> logs, ts;
    for (std::size_t k = begin; k < y.size(); ++k) {
        if (!(y[k] > 0.0)) return rep; // degenerate-oriented report, fit_valid = false
        logs.push_back(std::log(y[k]));
        ts.push_back(t[k]);
    }
    const LineFit fit = least_squares(ts, logs);
    rep.gamma_hat = fit.slope;
    rep.r_squared = fit.r_squared;
    rep.fit_valid = true;
    return rep;
}

ParetoFit pareto_fit(std::span<const double> x, std::span<const double> cdf,
                     std::optional<std::pair<double, double>> window) {
    if (x.size() != cdf.size())
        throw std::invalid_argument("pareto_fit: mismatched sample arrays");
    double xa, xb;
    if (window) {
        xa = window->first;
        xb = window->second;
    } else {
        // top decade of x with 1-Phi inside [1e-6, 1e-1]
        double x_hi = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double tail = 1.0 - cdf[i];
            if (x[i] > 0.0 && tail >= 1e-6 && tail <= 1e-1) x_hi = std::max(x_hi, x[i]);
        }
        if (x_hi == 0.0) throw std::invalid_argument("pareto_fit: no usable tail window");
        xa = x_hi / 10.0;
        xb = x_hi;
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double tail = 1.0 - cdf[i];
        if (x[i] >= xa && x[i] <= xb && x[i] > 0.0 && tail > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(tail));
        }
    }
    if (lx.size() < 10)
        throw std::invalid_argument("pareto_fit: window holds fewer than 10 samples");
    const LineFit fit = least_squares(lx, ly);
    ParetoFit out;
    out.theta_hat = -1.0 / fit.slope;
    out.k_hat = std::exp(fit.intercept);
    out.x_a = xa;
    out.x_b = xb;
    out.residual = fit.rms_residual;
    return out;
}

ParetoFit pareto_fit(const CdfProfile& cdf, std::optional<std::pair<double, double>> window) {
    return pareto_fit(cdf.grid.nodes(), cdf.values, window);
}

namespace {

double leading_mass_fraction(const DensityProfile& f) {
    const std::size_t lead = std::max<std::size_t>(1, f.grid.n_cells / 20);
    std::vector<double> head(f.values.begin(),
                             f.values.begin() + static_cast<std::ptrdiff_t>(lead + 1));
    const double m_head = trapezoid(head, f.grid.spacing());
    const double m_all = trapezoid(f.values, f.grid.spacing());
    return m_all > 0.0 ? m_head / m_all : 0.0;
}

bool strictly_decreasing_last_quarter(std::span<const double> y) {
    if (y.size() < 4) return false;
    const std::size_t begin = y.size() - y.size() / 4;
    for (std::size_t k = begin; k + 1 < y.size(); ++k)
        if (!(y[k + 1] < y[k])) return false;
    return true;
}

} // namespace

DegeneracyReport degeneracy_check(const TdTrace& trace) {
    DegeneracyReport rep;
    rep.gamma = std::numeric_limits<double>::quiet_NaN();
    if (!trace.f_snapshots.empty())
        rep.low_mass_fraction = leading_mass_fraction(trace.f_snapshots.back());
    rep.production_decreasing = strictly_decreasing_last_quarter(trace.production);
    rep.degenerate = rep.low_mass_fraction > 0.9 || rep.production_decreasing;
    return rep;
}

DegeneracyReport degeneracy_check(const BgpSolution& sol) {
    DegeneracyReport rep;
    rep.gamma = sol.gamma;
    rep.low_mass_fraction = leading_mass_fraction(sol.phi);
    rep.production_decreasing = false;
    rep.degenerate = rep.low_mass_fraction > 0.9 || sol.gamma < 1e-8;
    return rep;
}

double front_speed(const KppTrace& trace, double level) {
    if (trace.g_snapshots.size() < 4)
        throw std::invalid_argument("front_speed: need at least 4 snapshots");
    std::vector<double> ts, ys;
    for (std::size_t k = 0; k < trace.g_snapshots.size(); ++k) {
        const auto& g = trace.g_snapshots[k];
        const bool down = g.front() >= g.back();
        double pos = std::numeric_limits<double>::quiet_NaN();
        int crossings = 0;
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            const bool crossed = down ? (g[i] >= level && g[i + 1] < level)
                                      : (g[i] <= level && g[i + 1] > level);
            if (crossed) {
                ++crossings;
                const double t = (g[i] - level) / (g[i] - g[i + 1]);
                pos = trace.y[i] + t * (trace.y[i + 1] - trace.y[i]);
            }
            // monotone fronts only
            const bool bad = down ? (g[i + 1] > g[i] + 1e-12) : (g[i + 1] < g[i] - 1e-12);
            if (bad)
                throw std::runtime_error("front_speed: non-monotone snapshot at index " +
                                         std::to_string(k));
        }
        if (crossings != 1)
            throw std::runtime_error("front_speed: snapshot " + std::to_string(k) +
                                     " does not cross the level exactly once");
        ts.push_back(trace.snapshot_times[k]);
        ys.push_back(pos);
    }
    // least-squares slope over the second half of the run
    const double t_mid = 0.5 * (ts.front() + ts.back());
    std::vector<double> t2, y2;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (ts[k] >= t_mid) {
            t2.push_back(ts[k]);
            y2.push_back(ys[k]);
        }
    }
    return least_squares(t2, y2).slope;
}

std::vector<InvariantResult> check_bgp_invariants(const BgpSolution& sol, const BgpConfig& cfg) {
    std::vector<InvariantResult> out;
    const double h = sol.phi.grid.spacing();
    const std::size_t n = sol.phi.values.size();

    const double mass_defect = std::abs(trapezoid(sol.phi.values, h) - 1.0);
    out.push_back({"mass_defect", mass_defect <= 1e-8, mass_defect, 1e-8});

    double dv_min = std::numeric_limits<double>::infinity(), dv_max = -dv_min;
    for (std::size_t i = 1; i < n; ++i) {
        const double dv = (sol.v.values[i] - sol.v.values[i - 1]) / h;
        dv_min = std::min(dv_min, dv);
        dv_max = std::max(dv_max, dv);
    }
    out.push_back({"v_nondecreasing", dv_min >= -1e-8, dv_min, 0.0});
    out.push_back({"dv_within_1_over_r", dv_max <= 1.0 / cfg.r + 1e-8, dv_max, 1.0 / cfg.r});

    bool s_mono = is_nonincreasing(sol.s.values, tol::num_tol);
    out.push_back({"policy_nonincreasing", s_mono, s_mono ? 0.0 : 1.0, 0.0});

    // v constant on [0, x0], relative to v(0)
    double vdev = 0.0;
    if (sol.x0.x0 > 0.0 && std::abs(sol.v.values[0]) > 0.0) {
        for (std::size_t i = 0; i < n && sol.phi.grid.node(i) <= sol.x0.x0; ++i)
            vdev = std::max(vdev, std::abs(sol.v.values[i] - sol.v.values[0]));
        vdev /= std::abs(sol.v.values[0]);
    }
    out.push_back({"v_constant_below_x0", vdev <= 1e-6, vdev, 1e-6});

    if (sol.gamma < cfg.r) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            worst = std::min(worst, sol.v.values[i] - sol.phi.grid.node(i) / cfg.r);
        out.push_back({"v_at_least_x_over_r", worst >= -1e-6, worst, -1e-6});
    }

    out.push_back({"gamma_consistency", sol.residuals.gamma_defect <= 1e-4,
                   sol.residuals.gamma_defect, 1e-4});

    if (cfg.nu == 0.0) {
        const double ratio = sol.gamma / cfg.theta;
        const double a1 = cfg.lf.alpha(1.0);
        out.push_back({"gamma_over_theta_bound", ratio <= a1 + 1e-8, ratio, a1});
    }
    return out;
}

} // namespace kg
