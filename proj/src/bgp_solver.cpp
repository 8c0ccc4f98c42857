#include "kg/bgp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "kg/kernels.hpp"
#include "kg/ktransform.hpp"
#include "kg/quadrature.hpp"
#include "kg/tridiag.hpp"

namespace kg {

void BgpConfig::validate() const {
    if (nu < 0.0) throw std::invalid_argument("BgpConfig: nu must be nonnegative");
    if (!(r > 0.0)) throw std::invalid_argument("BgpConfig: r must be positive");
    if (!(omega > 0.0 && omega <= 1.0))
        throw std::invalid_argument("BgpConfig: omega must lie in (0,1]");
    if (!(fp_tol > 0.0)) throw std::invalid_argument("BgpConfig: fp_tol must be positive");
    if (max_iters < 1) throw std::invalid_argument("BgpConfig: max_iters must be at least 1");
    if (eps_hjb < 0.0) throw std::invalid_argument("BgpConfig: eps_hjb must be nonnegative");
    if (nu == 0.0) {
        if (!(theta > 0.0 && theta < 1.0))
            throw std::invalid_argument("BgpConfig: nu = 0 requires theta in (0,1)");
        if (!(k_tail > 0.0))
            throw std::invalid_argument("BgpConfig: nu = 0 requires a positive k_tail");
        if (!(ktr_step > 0.0) || !(ktr_xtilde_max > 0.0))
            throw std::invalid_argument("BgpConfig: invalid transform-grid controls");
    } else {
        // the diffusive gamma update replaces the theta formula; reject silent misuse
        if (theta != 0.0)
            throw std::invalid_argument("BgpConfig: theta is only consumed when nu = 0");
        if (k_tail != 0.0)
            throw std::invalid_argument("BgpConfig: k_tail is only consumed when nu = 0");
    }
}

namespace {

std::vector<double> alpha_of(const PolicyProfile& s, const LearningFunction& lf) {
    std::vector<double> a(s.values.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = lf.alpha(s.values[i]);
    return a;
}

// Stencil rows of the diffusive BGP-Boltzmann equation (interior only);
// row 0 pins phi_0 = 0 and row N is the one-sided no-flux condition.
Tridiagonal phi_matrix(double gamma, const BgpConfig& cfg) {
    const std::size_t n = cfg.grid.n_nodes();
    const double h = cfg.grid.spacing();
    const double nu = cfg.nu;
    Tridiagonal m(n);
    m.diag[0] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double xi = cfg.grid.node(i);
        const double xn = cfg.grid.node(i + 1);
        m.diag[i] = -gamma + gamma * xi / h + 2.0 * nu * xi / h + nu * (xn * xn + xi * xi) / (h * h);
        m.upper[i] = -gamma * xi / h - 2.0 * nu * xn / h - nu * xn * xn / (h * h);
        m.lower[i] = -nu * xi * xi / (h * h);
    }
    const double xN = cfg.grid.node(n - 1);
    const double xM = cfg.grid.node(n - 2);
    m.diag[n - 1] = xN * xN;
    m.lower[n - 1] = -xM * xM;
    return m;
}

struct TransformStep {
    DensityProfile phi;
    CdfProfile cdf;
    double gamma;
    double k_defect;
};

// nu = 0 phi update: integrate the transformed equation outward from
// K(0) = k_tilde, with a secant on k_tilde so the reconstructed tail
// coefficient (gamma/theta) k_tilde hits cfg.k_tail; the density follows in
// closed form and is normalized to unit trapezoid mass on the x grid.
// The solve depends on the policy only through the alpha(S~) samples, so a
// one-entry cache keyed on them short-circuits repeated identical solves
// (every iteration of a constant-alpha run).
TransformStep transform_solve(const std::vector<double>& a_tilde, double gamma_guess,
                              const BgpConfig& cfg) {
    const auto cells = static_cast<std::size_t>(std::llround(cfg.ktr_xtilde_max / cfg.ktr_step));
    double kt = cfg.theta * cfg.k_tail / std::max(gamma_guess, 1e-10);
    double kt_prev = 0.0, k_prev = 0.0;
    KProfile kp;
    double gamma = 0.0, k_cur = 0.0;
    for (int it = 0; it < 16; ++it) {
        kp = solve_k(kt, a_tilde, cfg.theta, cfg.ktr_xtilde_max, cells);
        gamma = gamma_from_k(kp);
        k_cur = gamma * kt / cfg.theta;
        if (std::abs(k_cur - cfg.k_tail) <= 1e-10 * cfg.k_tail) break;
        double kt_next;
        if (it > 0 && k_cur != k_prev)
            kt_next = kt + (cfg.k_tail - k_cur) * (kt - kt_prev) / (k_cur - k_prev);
        else
            kt_next = kt * cfg.k_tail / k_cur;
        kt_prev = kt;
        k_prev = k_cur;
        kt = std::max(kt_next, 1e-12);
    }
    if (std::abs(k_cur - cfg.k_tail) > 1e-6 * cfg.k_tail)
        throw std::runtime_error("run_bgp: tail-coefficient secant did not converge");

    DensityProfile phi = density_from_k(kp, gamma, cfg.grid);
    const double m = mass(phi);
    for (double& v : phi.values) v /= m;
    phi.normalized = true;
    CdfProfile cdf = phi_from_k(kp, gamma, cfg.grid);
    for (double& v : cdf.values) v /= m;
    return {std::move(phi), std::move(cdf), gamma, std::abs(k_cur - cfg.k_tail)};
}

class TransformPhiStep {
public:
    explicit TransformPhiStep(const BgpConfig& cfg) : cfg_(cfg) {
        cells_ = static_cast<std::size_t>(std::llround(cfg.ktr_xtilde_max / cfg.ktr_step));
    }

    const TransformStep& operator()(const PolicyProfile& s_prev, double gamma_guess) {
        std::vector<double> a_tilde = policy_alpha_to_xtilde(s_prev, cfg_.lf, cfg_.theta,
                                                             cfg_.ktr_xtilde_max, cells_);
        if (!have_ || a_tilde != cached_alpha_) {
            cached_ = transform_solve(a_tilde, gamma_guess, cfg_);
            cached_alpha_ = std::move(a_tilde);
            have_ = true;
        }
        return cached_;
    }

private:
    const BgpConfig& cfg_;
    std::size_t cells_;
    bool have_ = false;
    std::vector<double> cached_alpha_;
    TransformStep cached_;
};

} // namespace

DensityProfile bgp_phi_step(const DensityProfile& phi_prev, const PolicyProfile& s_prev,
                            double gamma_prev, const BgpConfig& cfg) {
    cfg.validate();
    if (cfg.nu == 0.0)
        throw std::invalid_argument(
            "bgp_phi_step: the nu = 0 update solves the transformed equation; use run_bgp");
    if (phi_prev.grid != cfg.grid || s_prev.grid != cfg.grid)
        throw std::invalid_argument("bgp_phi_step: profile grids do not match the config");

    const std::size_t n = cfg.grid.n_nodes();
    const double h = cfg.grid.spacing();
    const std::vector<double> as = alpha_of(s_prev, cfg.lf);
    std::vector<double> q1 = kernels::collision_rhs(phi_prev.values, as, h, true);
    q1[0] = 0.0;
    q1[n - 1] = 0.0;

    // trapezoid mass row; the border column skips the pinned and BC rows
    std::vector<double> row(n, h), col(n, h);
    row[0] = 0.0;
    row[n - 1] = 0.5 * h;
    col[0] = 0.0;
    col[n - 1] = 0.0;

    const Tridiagonal a = phi_matrix(gamma_prev, cfg);
    BorderedSolution sol = solve_bordered(a, col, row, q1, 1.0);
    return DensityProfile{cfg.grid, std::move(sol.x), true};
}

ValueProfile bgp_v_step(const DensityProfile& phi_new, const ValueProfile& v_prev,
                        const PolicyProfile& s_prev, double gamma_prev, const BgpConfig& cfg) {
    cfg.validate();
    if (phi_new.grid != cfg.grid || v_prev.grid != cfg.grid || s_prev.grid != cfg.grid)
        throw std::invalid_argument("bgp_v_step: profile grids do not match the config");
    if (cfg.nu == 0.0 && cfg.r - gamma_prev <= 0.0)
        throw std::runtime_error("bgp_v_step: ill-posed, r - gamma <= 0 with nu = 0");

    const std::size_t n = cfg.grid.n_nodes();
    const double h = cfg.grid.spacing();
    const double nu = cfg.nu;
    const double rg = cfg.r - gamma_prev;

    const std::vector<double> b = kernels::b_values(v_prev.values, phi_new.values, h);
    std::vector<double> q2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = cfg.grid.node(i);
        const double si = s_prev.values[i];
        q2[i] = (1.0 - si) * x + cfg.lf.alpha(si) * b[i];
    }

    Tridiagonal m(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double x = cfg.grid.node(i);
        const double adv = gamma_prev * (x + cfg.eps_hjb) / h;
        const double dif = nu * x * x / (h * h);
        m.diag[i] = rg + adv + 2.0 * dif;
        m.lower[i] = -adv - dif;
        m.upper[i] = -dif;
    }
    {
        // v'(0) = 0: ghost reflection (x_0 = 0 kills the advection there)
        const double dif = nu * cfg.grid.node(0) * cfg.grid.node(0) / (h * h);
        m.diag[0] = rg + gamma_prev * cfg.eps_hjb / h + 2.0 * dif;
        m.upper[0] = -gamma_prev * cfg.eps_hjb / h - 2.0 * dif;
    }
    {
        // v'(x_max) = 0
        const double x = cfg.grid.node(n - 1);
        const double adv = gamma_prev * (x + cfg.eps_hjb) / h;
        const double dif = nu * x * x / (h * h);
        m.diag[n - 1] = rg + adv + 2.0 * dif;
        m.lower[n - 1] = -adv - 2.0 * dif;
    }
    return ValueProfile{cfg.grid, solve_tridiagonal(m, q2)};
}

std::pair<PolicyProfile, double> policy_gamma_update(const DensityProfile& phi_new,
                                                     const ValueProfile& v_new,
                                                     const BgpConfig& cfg) {
    cfg.validate();
    if (phi_new.grid != cfg.grid || v_new.grid != cfg.grid)
        throw std::invalid_argument("policy_gamma_update: profile grids do not match the config");
    const double h = cfg.grid.spacing();
    const std::vector<double> b = kernels::b_values(v_new.values, phi_new.values, h);
    PolicyProfile s = policy_from_b(b, cfg.grid, cfg.lf);
    std::vector<double> integrand(s.values.size());
    for (std::size_t i = 0; i < integrand.size(); ++i)
        integrand[i] = cfg.lf.alpha(s.values[i]) * phi_new.values[i];
    const double total = trapezoid(integrand, h);
    if (total < 0.0)
        throw std::runtime_error("policy_gamma_update: negative interaction integral");
    const double gamma = cfg.nu > 0.0 ? 2.0 * std::sqrt(cfg.nu * total) : cfg.theta * total;
    return {std::move(s), gamma};
}

namespace {

double rel_change(const std::vector<double>& now, const std::vector<double>& before) {
    double dmax = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < now.size(); ++i) {
        dmax = std::max(dmax, std::abs(now[i] - before[i]));
        scale = std::max(scale, std::abs(before[i]));
    }
    return scale > 0.0 ? dmax / scale : dmax;
}

// Row defect of the phi system at the converged iterate (nu > 0). The
// converged rows satisfy A phi + lambda w = q1, where lambda balances the
// tail mass flux of the truncated domain; the defect is fitted for that
// constant force and the remainder is reported row-relative (a pure
// scheme/iteration consistency measure).
struct PhiResidual {
    double net;
    double lambda_hat;
};

PhiResidual phi_residual(const DensityProfile& phi, const PolicyProfile& s, double gamma,
                         const BgpConfig& cfg) {
    const std::size_t n = cfg.grid.n_nodes();
    const double h = cfg.grid.spacing();
    const std::vector<double> as = alpha_of(s, cfg.lf);
    const std::vector<double> q1 = kernels::collision_rhs(phi.values, as, h, true);
    const Tridiagonal a = phi_matrix(gamma, cfg);
    std::vector<double> defect(n, 0.0);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double lhs = a.lower[i] * phi.values[i - 1] + a.diag[i] * phi.values[i] +
                           a.upper[i] * phi.values[i + 1];
        defect[i] = lhs - q1[i];
        num += defect[i] * h;
        den += h * h;
    }
    const double lambda_hat = num / den;
    double res = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double scale = std::abs(a.lower[i] * phi.values[i - 1]) +
                             std::abs(a.diag[i] * phi.values[i]) +
                             std::abs(a.upper[i] * phi.values[i + 1]) + std::abs(q1[i]);
        res = std::max(res, std::abs(defect[i] - lambda_hat * h) / std::max(scale, 1e-300));
    }
    return {res, lambda_hat};
}

double v_residual(const BgpSolution& sol, const BgpConfig& cfg) {
    ValueProfile again = bgp_v_step(sol.phi, sol.v, sol.s, sol.gamma, cfg);
    double res = 0.0;
    for (std::size_t i = 0; i < again.values.size(); ++i)
        res = std::max(res, std::abs(again.values[i] - sol.v.values[i]));
    return res;
}

} // namespace

BgpSolution run_bgp(const BgpConfig& cfg, std::optional<DensityProfile> phi_init,
                    std::optional<ValueProfile> v_init) {
    cfg.validate();
    const std::size_t n = cfg.grid.n_nodes();
    const double h = cfg.grid.spacing();
    const double a1 = cfg.lf.alpha(1.0);

    DensityProfile phi = phi_init ? std::move(*phi_init) : gaussian_density(cfg.grid);
    phi.values[0] = 0.0;
    {
        const double m0 = trapezoid(phi.values, h);
        for (double& v : phi.values) v /= m0;
        phi.normalized = true;
    }
    ValueProfile v = v_init ? std::move(*v_init) : ValueProfile{cfg.grid, {}};
    if (v.values.empty()) {
        v.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) v.values[i] = cfg.grid.node(i) / cfg.r;
    }
    require_aligned(cfg.grid, phi.values.size(), "run_bgp");
    require_aligned(cfg.grid, v.values.size(), "run_bgp");

    double gamma = cfg.nu > 0.0 ? std::sqrt(cfg.nu * a1) : 0.5 * cfg.theta * a1;
    PolicyProfile s =
        policy_from_b(kernels::b_values(v.values, phi.values, h), cfg.grid, cfg.lf);

    BgpSolution sol;
    sol.degenerate = false;
    int low_gamma_streak = 0;
    bool converged = false;
    int it = 0;
    std::vector<double> scratch(n);
    TransformPhiStep transform_step(cfg);

    for (it = 1; it <= cfg.max_iters; ++it) {
        DensityProfile phi_raw{cfg.grid, {}, true};
        if (cfg.nu > 0.0) {
            phi_raw = bgp_phi_step(phi, s, gamma, cfg);
        } else {
            // a policy collapsing to S = 0 leaves the transformed equation
            // without a saturating tail; that is the no-growth branch
            try {
                phi_raw = transform_step(s, gamma > 0.0 ? gamma : 0.5 * cfg.theta * a1).phi;
            } catch (const std::runtime_error&) {
                sol.degenerate = true;
                break;
            }
        }
        kernels::blend(cfg.omega, phi.values, phi_raw.values, scratch);
        const double dphi = rel_change(scratch, phi.values);
        DensityProfile phi_new{cfg.grid, scratch, true};

        ValueProfile v_raw = bgp_v_step(phi_new, v, s, gamma, cfg);
        kernels::blend(cfg.omega, v.values, v_raw.values, scratch);
        const double dv = rel_change(scratch, v.values);
        ValueProfile v_new{cfg.grid, scratch};

        auto [s_raw, gamma_raw] = policy_gamma_update(phi_new, v_new, cfg);
        kernels::blend(cfg.omega, s.values, s_raw.values, scratch);
        PolicyProfile s_new{cfg.grid, scratch};
        const double gamma_new = (1.0 - cfg.omega) * gamma + cfg.omega * gamma_raw;
        const double dg = std::abs(gamma_new - gamma) / std::max(std::abs(gamma), 1e-300);

        phi = std::move(phi_new);
        v = std::move(v_new);
        s = std::move(s_new);
        gamma = gamma_new;

        low_gamma_streak = gamma < 1e-8 ? low_gamma_streak + 1 : 0;
        if (low_gamma_streak >= 10) {
            sol.degenerate = true;
            break;
        }
        if (std::max({dphi, dv, dg}) < cfg.fp_tol) {
            converged = true;
            break;
        }
    }

    // mass collapsing into the first 5% of the grid also marks degeneracy
    {
        const std::size_t lead = std::max<std::size_t>(1, cfg.grid.n_cells / 20);
        std::vector<double> head(phi.values.begin(),
                                 phi.values.begin() + static_cast<std::ptrdiff_t>(lead + 1));
        const double mhead = trapezoid(head, h);
        if (mhead / trapezoid(phi.values, h) > 0.9) sol.degenerate = true;
    }

    sol.phi = std::move(phi);
    sol.v = std::move(v);
    sol.s = std::move(s);
    sol.gamma = gamma;
    sol.converged = converged;
    sol.iterations = std::min(it, cfg.max_iters);

    const std::vector<double> b = kernels::b_values(sol.v.values, sol.phi.values, h);
    sol.x0 = find_x0(b, cfg.grid, cfg.lf);

    if (cfg.nu > 0.0) {
        sol.cdf = cdf_from_density(sol.phi);
        const PhiResidual pr = phi_residual(sol.phi, sol.s, sol.gamma, cfg);
        sol.residuals.boltzmann = pr.net;
        sol.residuals.constraint_force = pr.lambda_hat;
    } else {
        sol.cdf = cdf_from_density(sol.phi);
        try {
            const TransformStep& again = transform_step(sol.s, std::max(sol.gamma, 1e-10));
            double res = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                res = std::max(res, std::abs(again.phi.values[i] - sol.phi.values[i]));
            sol.residuals.boltzmann = res;
            sol.cdf = again.cdf; // exact transform values, no head-quadrature artifact
        } catch (const std::runtime_error&) {
            sol.residuals.boltzmann = std::numeric_limits<double>::infinity();
        }
    }
    sol.residuals.hjb = v_residual(sol, cfg);
    {
        auto [s_chk, gamma_chk] = policy_gamma_update(sol.phi, sol.v, cfg);
        (void)s_chk;
        sol.residuals.gamma_defect = std::abs(sol.gamma - gamma_chk);
    }
    return sol;
}

} // namespace kg
