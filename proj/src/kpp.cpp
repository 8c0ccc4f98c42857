#include "kg/kpp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kg/kernels.hpp"
#include "kg/tridiag.hpp"

namespace kg {

void KppConfig::validate() const {
    if (nu < 0.0) throw std::invalid_argument("KppConfig: nu must be nonnegative");
    if (!(alpha0 > 0.0)) throw std::invalid_argument("KppConfig: alpha0 must be positive");
    if (!(y_max > y_min)) throw std::invalid_argument("KppConfig: empty y interval");
    if (n_cells < 2) throw std::invalid_argument("KppConfig: need at least 2 cells");
    if (!(tau > 0.0)) throw std::invalid_argument("KppConfig: tau must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("KppConfig: horizon must be positive");
    if (tau * alpha0 > 0.25)
        throw std::invalid_argument("KppConfig: explicit reaction needs tau*alpha0 <= 0.25");
}

std::size_t KppConfig::n_steps() const {
    return static_cast<std::size_t>(std::llround(horizon / tau));
}

std::vector<double> kpp_step_front(const KppConfig& cfg, double y0) {
    std::vector<double> g(cfg.n_cells + 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = cfg.y_min + static_cast<double>(i) * cfg.spacing();
        g[i] = y < y0 ? 1.0 : (y > y0 ? 0.0 : 0.5);
    }
    return g;
}

KppTrace kpp_run(const KppConfig& cfg, const std::vector<double>& g0) {
    cfg.validate();
    const std::size_t n = cfg.n_cells + 1;
    if (g0.size() != n) throw std::invalid_argument("kpp_run: initial front size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(g0[i] >= 0.0 && g0[i] <= 1.0))
            throw std::invalid_argument("kpp_run: initial front must lie in [0,1]");
        if (i > 0 && g0[i] > g0[i - 1] + 1e-12)
            throw std::invalid_argument("kpp_run: initial front must be non-increasing");
    }

    const double h = cfg.spacing();
    const double c = cfg.nu / (h * h);
    Tridiagonal m(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        m.diag[i] = 1.0 / cfg.tau + 2.0 * c;
        m.lower[i] = -c;
        m.upper[i] = -c;
    }
    m.diag[0] = 1.0;      // Dirichlet G = 1
    m.diag[n - 1] = 1.0;  // Dirichlet G = 0

    const std::size_t steps = cfg.n_steps();
    const std::size_t stride =
        cfg.snapshot_stride > 0 ? cfg.snapshot_stride : (steps + 399) / 400;

    KppTrace trace;
    trace.y.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        trace.y[i] = cfg.y_min + static_cast<double>(i) * h;

    std::vector<double> g = g0, rhs(n);
    auto record = [&](double t) {
        trace.snapshot_times.push_back(t);
        trace.g_snapshots.push_back(g);
        // truncation watch: the front (level 0.5) within 10 cells of an end
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (g[i] >= 0.5 && g[i + 1] < 0.5) {
                if (i < 10 || i + 10 > n - 1) trace.truncation_warning = true;
                break;
            }
        }
    };
    record(0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        // rhs = (g + tau*alpha0*g(1-g)) / tau, Dirichlet values pinned
        kernels::logistic_reaction(g, cfg.alpha0 * cfg.tau, rhs);
        for (std::size_t i = 1; i + 1 < n; ++i) rhs[i] /= cfg.tau;
        rhs[0] = 1.0;
        rhs[n - 1] = 0.0;
        g = solve_tridiagonal(m, rhs);
        g[0] = 1.0;
        g[n - 1] = 0.0;
        if ((k + 1) % stride == 0 || k + 1 == steps)
            record(static_cast<double>(k + 1) * cfg.tau);
    }
    return trace;
}

} // namespace kg
