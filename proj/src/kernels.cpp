#include "kg/kernels.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

#include "kg/maximizer.hpp"
#include "kg/quadrature.hpp"

namespace kg::kernels {

namespace {
void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": size mismatch");
}
} // namespace

std::vector<double> b_values(std::span<const double> v, std::span<const double> phi, double h) {
    require_same_size(v.size(), phi.size(), "b_values");
    const std::size_t n = v.size();
    // B_i = suffix T[v phi] - v_i * suffix T[phi]; serial scans keep the
    // reduction order fixed, the combine is a pure map.
    std::vector<double> vphi(n);
    for (std::size_t i = 0; i < n; ++i) vphi[i] = v[i] * phi[i];
    const std::vector<double> q = suffix_trapezoid(vphi, h);
    const std::vector<double> m = suffix_trapezoid(phi, h);
    std::vector<double> b(n);
    const std::int64_t ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < ni; ++i) b[i] = q[i] - v[i] * m[i];
    b[n - 1] = 0.0;
    return b;
}

std::vector<double> collision_rhs(std::span<const double> f, std::span<const double> alpha_s,
                                  double h, bool antisym_boundary) {
    require_same_size(f.size(), alpha_s.size(), "collision_rhs");
    const std::size_t n = f.size();
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = alpha_s[i] * f[i];
    std::vector<double> gain = prefix_trapezoid(g, h);   // T[alpha(S) f; 0, x_i]
    std::vector<double> loss = suffix_trapezoid(f, h);   // T[f; x_i, x_max]
    if (antisym_boundary) {
        // Drop the boundary nodes' own half-weights (node 0 in its loss
        // integral, node N in its gain integral); the discrete collision
        // mass then cancels pairwise for any f.
        loss[0] -= 0.5 * h * f[0];
        gain[n - 1] -= 0.5 * h * g[n - 1];
    }
    std::vector<double> out(n);
    const std::int64_t ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < ni; ++i) out[i] = f[i] * gain[i] - g[i] * loss[i];
    return out;
}

void policy_map(std::span<const double> x, std::span<const double> b,
                const LearningFunction& lf, std::span<double> out) {
    require_same_size(x.size(), b.size(), "policy_map");
    require_same_size(x.size(), out.size(), "policy_map");
    const std::int64_t n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[i] = optimal_control(x[i], b[i], lf).s;
}

void logistic_reaction(std::span<const double> g, double a0tau, std::span<double> out) {
    require_same_size(g.size(), out.size(), "logistic_reaction");
    const std::int64_t n = static_cast<std::int64_t>(g.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[i] = g[i] + a0tau * g[i] * (1.0 - g[i]);
}

void blend(double omega, std::span<const double> a, std::span<const double> b,
           std::span<double> out) {
    require_same_size(a.size(), b.size(), "blend");
    require_same_size(a.size(), out.size(), "blend");
    const std::int64_t n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[i] = (1.0 - omega) * a[i] + omega * b[i];
}

namespace serial {

std::vector<double> b_values(std::span<const double> v, std::span<const double> phi, double h) {
    require_same_size(v.size(), phi.size(), "serial::b_values");
    const std::size_t n = v.size();
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // direct trapezoid of (v(y) - v_i) phi(y) over [x_i, x_max];
        // the integrand vanishes at y = x_i
        double sum = 0.5 * (v[n - 1] - v[i]) * phi[n - 1];
        for (std::size_t j = i + 1; j + 1 < n; ++j) sum += (v[j] - v[i]) * phi[j];
        b[i] = h * sum;
    }
    return b;
}

std::vector<double> collision_rhs(std::span<const double> f, std::span<const double> alpha_s,
                                  double h, bool antisym_boundary) {
    require_same_size(f.size(), alpha_s.size(), "serial::collision_rhs");
    const std::size_t n = f.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double gain = 0.0;
        if (i > 0) {
            gain = 0.5 * (alpha_s[0] * f[0] + alpha_s[i] * f[i]);
            for (std::size_t j = 1; j < i; ++j) gain += alpha_s[j] * f[j];
            gain *= h;
        }
        double loss = 0.0;
        if (i + 1 < n) {
            loss = 0.5 * (f[i] + f[n - 1]);
            for (std::size_t j = i + 1; j + 1 < n; ++j) loss += f[j];
            loss *= h;
        }
        if (antisym_boundary) {
            if (i == 0 && n > 1) loss -= 0.5 * h * f[0];
            if (i == n - 1 && n > 1) gain -= 0.5 * h * alpha_s[i] * f[i];
        }
        out[i] = f[i] * gain - alpha_s[i] * f[i] * loss;
    }
    return out;
}

void policy_map(std::span<const double> x, std::span<const double> b,
                const LearningFunction& lf, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = optimal_control(x[i], b[i], lf).s;
}

void logistic_reaction(std::span<const double> g, double a0tau, std::span<double> out) {
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] + a0tau * g[i] * (1.0 - g[i]);
}

void blend(double omega, std::span<const double> a, std::span<const double> b,
           std::span<double> out) {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - omega) * a[i] + omega * b[i];
}

} // namespace serial

} // namespace kg::kernels
