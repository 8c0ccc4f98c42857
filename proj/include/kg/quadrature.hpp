#pragma once

#include <span>
#include <vector>

#include "kg/profiles.hpp"

namespace kg {

/// Composite trapezoid rule: h*(v0/2 + v1 + ... + v_{N-1} + vN/2).
/// Exact for affine integrands. Throws std::invalid_argument for < 2 samples.
double trapezoid(std::span<const double> values, double h);

/// P_i = trapezoid of `values` over [x_0, x_i]; P_0 = 0.
std::vector<double> prefix_trapezoid(std::span<const double> values, double h);

/// Q_i = trapezoid of `values` over [x_i, x_N]; Q_N = 0.
std::vector<double> suffix_trapezoid(std::span<const double> values, double h);

/// Phi_i = cumulative trapezoid of f up to x_i. Phi_0 = 0, non-decreasing for f >= 0.
CdfProfile cdf_from_density(const DensityProfile& f);

double mass(const DensityProfile& f);

/// Meeting-gain functional B_i = integral over [x_i, x_max] of
/// (v(y) - v(x_i)) phi(y) dy; the infinite upper limit is truncated at the
/// grid end (error of the order of the neglected tail mass). Throws
/// std::invalid_argument when the profiles live on different grids.
std::vector<double> b_functional(const ValueProfile& v, const DensityProfile& phi);

} // namespace kg
