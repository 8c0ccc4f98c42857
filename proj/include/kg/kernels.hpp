#pragma once

#include <span>
#include <vector>

#include "kg/learning.hpp"

namespace kg::kernels {

// Hot nodewise assemblies shared by the solvers. The default entry points run
// the scan parts serially (fixed reduction order, so results are independent
// of the thread count) and parallelize the pointwise maps with OpenMP. The
// kernels::serial counterparts are direct transliterations of the integral
// definitions (O(N^2) nodewise quadrature); tests compare the two and the
// bench tool times them.

/// B_i = integral over [x_i, x_N] of (v(y) - v(x_i)) phi(y) dy, trapezoid rule.
/// B_N = 0 identically.
std::vector<double> b_values(std::span<const double> v, std::span<const double> phi, double h);

/// Collision right side of the Boltzmann equation at each node:
///   g_i = f_i * T[alpha_s f; 0, x_i] - alpha_s_i f_i * T[f; x_i, x_N]
/// with T the trapezoid rule. When `antisym_boundary` is set, the self
/// half-weight of node 0 in the loss integral and of node N in the gain
/// integral are dropped, which makes the trapezoid-weighted mass of the
/// output vanish identically for any f, alpha_s.
std::vector<double> collision_rhs(std::span<const double> f, std::span<const double> alpha_s,
                                  double h, bool antisym_boundary = true);

/// s_i = argmax over [0,1] of (1-s) x_i + alpha(s) B_i (closed-form three-case split).
void policy_map(std::span<const double> x, std::span<const double> b,
                const LearningFunction& lf, std::span<double> out);

/// out_i = g_i + a0tau * g_i (1 - g_i)  (explicit logistic reaction update).
void logistic_reaction(std::span<const double> g, double a0tau, std::span<double> out);

/// out = (1-omega) * a + omega * b.
void blend(double omega, std::span<const double> a, std::span<const double> b,
           std::span<double> out);

namespace serial {

std::vector<double> b_values(std::span<const double> v, std::span<const double> phi, double h);
std::vector<double> collision_rhs(std::span<const double> f, std::span<const double> alpha_s,
                                  double h, bool antisym_boundary = true);
void policy_map(std::span<const double> x, std::span<const double> b,
                const LearningFunction& lf, std::span<double> out);
void logistic_reaction(std::span<const double> g, double a0tau, std::span<double> out);
void blend(double omega, std::span<const double> a, std::span<const double> b,
           std::span<double> out);

} // namespace serial

} // namespace kg::kernels
