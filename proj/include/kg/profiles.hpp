#pragma once

#include <cstddef>
#include <vector>

#include "kg/grid.hpp"

namespace kg {

/// Agent density f (or rescaled phi): values per node, probability mass per
/// knowledge unit. `normalized` marks profiles whose trapezoid mass should be 1.
struct DensityProfile {
    UniformGrid grid;
    std::vector<double> values;
    bool normalized = false;
};

/// Cumulative distribution Phi/F on the grid.
struct CdfProfile {
    UniformGrid grid;
    std::vector<double> values;
};

/// Value function V (or rescaled v), discounted earnings units.
struct ValueProfile {
    UniformGrid grid;
    std::vector<double> values;
};

/// Optimal learning-time fraction S per node, values in [0,1].
struct PolicyProfile {
    UniformGrid grid;
    std::vector<double> values;
};

namespace tol {
inline constexpr double num_tol = 1e-9;
inline constexpr double mass_tol = 1e-8;
} // namespace tol

/// Throws std::invalid_argument unless the profile's value count matches its grid.
void require_aligned(const UniformGrid& grid, std::size_t n_values, const char* what);

/// True when every consecutive difference is >= -slack.
bool is_nondecreasing(const std::vector<double>& v, double slack = tol::num_tol);
bool is_nonincreasing(const std::vector<double>& v, double slack = tol::num_tol);

double min_value(const std::vector<double>& v);

/// Truncated Gaussian(mean, sd) on the grid, renormalized to unit trapezoid mass.
DensityProfile gaussian_density(const UniformGrid& grid, double mean = 5.0, double sd = 1.0);

} // namespace kg
