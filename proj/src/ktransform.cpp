#include "kg/ktransform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kg/learning.hpp"

namespace kg {

namespace {

// linear interpolation of samples on the uniform xt grid
double sample(const std::vector<double>& v, double step, double xt) {
    if (xt <= 0.0) return v.front();
    const double pos = xt / step;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    const double t = pos - static_cast<double>(i);
    return v[i] * (1.0 - t) + v[i + 1] * t;
}

struct Rates {
    double dk, di;
};

} // namespace

KProfile solve_k(double k_tilde, std::span<const double> alpha_s_tilde, double theta,
                 double xtilde_max, std::size_t n_cells) {
    if (!(k_tilde > 0.0)) throw std::invalid_argument("solve_k: k_tilde must be positive");
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("solve_k: theta must lie in (0,1)");
    if (n_cells < 8) throw std::invalid_argument("solve_k: grid too coarse");
    if (alpha_s_tilde.size() != n_cells + 1)
        throw std::invalid_argument("solve_k: alpha samples must match the xt grid");
    for (std::size_t i = 1; i < alpha_s_tilde.size(); ++i)
        if (alpha_s_tilde[i] < alpha_s_tilde[i - 1] - 1e-12)
            throw std::invalid_argument("solve_k: alpha(S~) must be non-decreasing in xt");

    KProfile kp;
    kp.xtilde_max = xtilde_max;
    kp.n_cells = n_cells;
    kp.k_tilde = k_tilde;
    kp.theta = theta;
    kp.alpha_s.assign(alpha_s_tilde.begin(), alpha_s_tilde.end());
    kp.k_values.resize(n_cells + 1);
    kp.constraint.resize(n_cells + 1);

    const double h = kp.step();
    std::vector<double> avec = kp.alpha_s;

    auto alpha_at = [&](double xt) { return sample(avec, h, xt); };

    // K' = -K I / xt, I' = alpha(S~) K (1 - I); at xt = 0 the limit is
    // K'(0) = -alpha(S~(0)) K^2 (the removable singularity).
    auto rates = [&](double xt, double k, double i) -> Rates {
        const double a = alpha_at(xt);
        if (xt <= 0.0) return {-a * k * k, a * k};
        return {-k * i / xt, a * k * (1.0 - i)};
    };

    kp.k_values[0] = k_tilde;
    kp.constraint[0] = 0.0;
    // series first step: K = kt (1 - a kt h + (a kt h)^2), I = a kt h - (a kt h)^2
    {
        const double a = avec[0];
        const double q = a * k_tilde * h;
        kp.k_values[1] = k_tilde * (1.0 - q + q * q);
        kp.constraint[1] = q - q * q;
    }

    const double slack = 1e-8 * std::max(1.0, k_tilde);
    auto check = [&](std::size_t i) {
        const double k = kp.k_values[i];
        const double kprev = kp.k_values[i - 1];
        const double li = kp.node(i) * k;
        const double lprev = kp.node(i - 1) * kprev;
        if (k > kprev + slack || k > k_tilde + slack || !(k > 0.0) || li < lprev - slack ||
            kp.constraint[i] > 1.0 + 1e-8)
            throw std::runtime_error("solve_k: invariant violated at xt = " +
                                     std::to_string(kp.node(i)));
    };
    check(1);

    for (std::size_t m = 1; m < n_cells; ++m) {
        const double xt = kp.node(m);
        const double k = kp.k_values[m];
        const double i = kp.constraint[m];
        const Rates r1 = rates(xt, k, i);
        const Rates r2 = rates(xt + 0.5 * h, k + 0.5 * h * r1.dk, i + 0.5 * h * r1.di);
        const Rates r3 = rates(xt + 0.5 * h, k + 0.5 * h * r2.dk, i + 0.5 * h * r2.di);
        const Rates r4 = rates(xt + h, k + h * r3.dk, i + h * r3.di);
        kp.k_values[m + 1] = k + h / 6.0 * (r1.dk + 2.0 * r2.dk + 2.0 * r3.dk + r4.dk);
        kp.constraint[m + 1] = i + h / 6.0 * (r1.di + 2.0 * r2.di + 2.0 * r3.di + r4.di);
        check(m + 1);
    }

    // first node where S~ saturates (alpha hits its s=1 value)
    kp.xtilde0 = xtilde_max;
    const double atop = avec.back();
    for (std::size_t i = 0; i < avec.size(); ++i) {
        if (avec[i] >= atop * (1.0 - 1e-12)) {
            kp.xtilde0 = kp.node(i);
            break;
        }
    }
    return kp;
}

namespace {

struct TailLimit {
    double limit;
    double defect; // |R1 - R2| / |R1|, the observable extrapolation error scale
};

TailLimit tail_limit(const KProfile& kp) {
    const std::size_t n = kp.n_cells;
    auto l = [&](std::size_t i) { return kp.node(i) * kp.k_values[i]; };
    const double ln = l(n), lh = l(n / 2), lq = l(n / 4);
    const double r1 = 2.0 * ln - lh;
    const double r2 = 2.0 * lh - lq;
    const double defect = std::abs(r1 - r2) / std::abs(r1);
    if (!(defect < 1e-4))
        throw std::runtime_error(
            "xtk_limit: tail of xt*K not saturated; extend xtilde_max (R1=" +
            std::to_string(r1) + ", R2=" + std::to_string(r2) + ")");
    return {r1 + (r1 - r2) / 3.0, defect};
}

} // namespace

double xtk_limit(const KProfile& kp) { return tail_limit(kp).limit; }

double gamma_from_k(const KProfile& kp) {
    const TailLimit tl = tail_limit(kp);
    if (!(tl.limit > 0.0)) throw std::runtime_error("gamma_from_k: nonpositive limit");
    const double gamma = kp.theta / tl.limit;

    // analytic bound sandwich, checked when the policy saturates on the grid;
    // the slack tracks the extrapolation's own residual
    const double a1 = kp.alpha_s.back();
    const double slack = 10.0 * tl.defect + 1e-8;
    if (a1 > 0.0 && kp.xtilde0 < kp.xtilde_max) {
        const double ratio = gamma / kp.theta;
        const double lower = 1.0 / (kp.k_tilde * kp.xtilde0 + 1.0 / a1);
        if (ratio > a1 * (1.0 + slack) || ratio < lower * (1.0 - slack))
            throw std::runtime_error("gamma_from_k: gamma/theta outside the analytic bounds");
    }
    return gamma;
}

namespace {

// Beyond the integrated range, (xt K)' = K(1-I) is continued by the power law
// fitted over the last dyadic pair; its integral continues xt*K toward the
// extrapolated limit. Both decay like xt^{-p} with p > 1 for saturating
// solves, reproducing the x -> 0 behavior phi ~ x^{1/theta - 1}.
struct TailContinuation {
    double m_end;   // K(1-I) at xtilde_max
    double p;       // fitted decay exponent
    double l_inf;   // extrapolated limit of xt K
    double xt_end;
};

TailContinuation fit_tail(const KProfile& kp) {
    const std::size_t n = kp.n_cells;
    auto m_at = [&](std::size_t i) {
        return std::max(kp.k_values[i] * (1.0 - kp.constraint[i]), 1e-300);
    };
    const double m_end = m_at(n), m_half = m_at(n / 2);
    double p = std::log2(m_half / m_end);
    if (!(p > 1.05)) p = 1.05; // keep the continued integral finite
    return {m_end, p, xtk_limit(kp), kp.node(n)};
}

double xtk_continued(const TailContinuation& tc, double xt) {
    // L(xt) = L_inf - integral_xt^inf m_end (xi/xt_end)^{-p} dxi
    const double tail = tc.m_end * xt * std::pow(xt / tc.xt_end, -tc.p) / (tc.p - 1.0);
    return tc.l_inf - tail;
}

} // namespace

CdfProfile phi_from_k(const KProfile& kp, double gamma, const UniformGrid& xgrid) {
    if (!(gamma > 0.0)) throw std::domain_error("phi_from_k: gamma must be positive");
    CdfProfile cdf{xgrid, std::vector<double>(xgrid.n_nodes(), 0.0)};
    const double h = kp.step();
    const TailContinuation tc = fit_tail(kp);
    for (std::size_t i = 1; i < cdf.values.size(); ++i) {
        const double x = xgrid.node(i);
        const double xt = std::pow(x, -1.0 / kp.theta);
        const double l =
            xt >= kp.xtilde_max ? xtk_continued(tc, xt) : sample(kp.k_values, h, xt) * xt;
        cdf.values[i] = std::max(0.0, 1.0 - (gamma / kp.theta) * l);
    }
    cdf.values[0] = 0.0;
    return cdf;
}

DensityProfile density_from_k(const KProfile& kp, double gamma, const UniformGrid& xgrid) {
    if (!(gamma > 0.0)) throw std::domain_error("density_from_k: gamma must be positive");
    DensityProfile phi{xgrid, std::vector<double>(xgrid.n_nodes(), 0.0), false};
    const double h = kp.step();
    const TailContinuation tc = fit_tail(kp);
    for (std::size_t i = 1; i < phi.values.size(); ++i) {
        const double x = xgrid.node(i);
        const double xt = std::pow(x, -1.0 / kp.theta);
        double m; // (xt K)' at xt
        if (xt >= kp.xtilde_max) {
            m = tc.m_end * std::pow(xt / tc.xt_end, -tc.p);
        } else {
            m = std::max(0.0, sample(kp.k_values, h, xt) *
                                  (1.0 - sample(kp.constraint, h, xt)));
        }
        // phi = (gamma/theta^2) (xt K)' x^{-1/theta - 1}
        phi.values[i] =
            (gamma / (kp.theta * kp.theta)) * m * std::pow(x, -1.0 / kp.theta - 1.0);
    }
    return phi;
}

std::vector<double> policy_alpha_to_xtilde(const PolicyProfile& s, const LearningFunction& lf,
                                           double theta, double xtilde_max,
                                           std::size_t n_cells) {
    require_aligned(s.grid, s.values.size(), "policy_alpha_to_xtilde");
    std::vector<double> out(n_cells + 1);
    const double ht = xtilde_max / static_cast<double>(n_cells);
    const double hx = s.grid.spacing();
    const std::size_t nx = s.grid.n_nodes();
    for (std::size_t i = 0; i <= n_cells; ++i) {
        const double xt = static_cast<double>(i) * ht;
        double sval;
        if (xt <= 0.0) {
            sval = s.values[nx - 1]; // xt -> 0 is x -> infinity
        } else {
            const double x = std::pow(xt, -theta);
            if (x >= s.grid.x_max) {
                sval = s.values[nx - 1];
            } else {
                const double pos = x / hx;
                const auto j = static_cast<std::size_t>(pos);
                const double t = pos - static_cast<double>(j);
                sval = j + 1 < nx ? s.values[j] * (1.0 - t) + s.values[j + 1] * t
                                  : s.values[nx - 1];
            }
        }
        out[i] = lf.alpha(std::clamp(sval, 0.0, 1.0));
    }
    // enforce monotonicity against interpolation wiggle
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::max(out[i], out[i - 1]);
    return out;
}

} // namespace kg
