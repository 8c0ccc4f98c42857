#include "kg/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kg/quadrature.hpp"

namespace kg {

void require_aligned(const UniformGrid& grid, std::size_t n_values, const char* what) {
    if (n_values != grid.n_nodes())
        throw std::invalid_argument(std::string(what) + ": profile has " +
                                    std::to_string(n_values) + " values for a grid of " +
                                    std::to_string(grid.n_nodes()) + " nodes");
}

bool is_nondecreasing(const std::vector<double>& v, double slack) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1] - slack) return false;
    return true;
}

bool is_nonincreasing(const std::vector<double>& v, double slack) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] + slack) return false;
    return true;
}

double min_value(const std::vector<double>& v) {
    return *std::min_element(v.begin(), v.end());
}

DensityProfile gaussian_density(const UniformGrid& grid, double mean, double sd) {
    DensityProfile f{grid, std::vector<double>(grid.n_nodes()), true};
    const double norm = 1.0 / (sd * std::sqrt(2.0 * M_PI));
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double z = (grid.node(i) - mean) / sd;
        f.values[i] = norm * std::exp(-0.5 * z * z);
    }
    const double m = trapezoid(f.values, grid.spacing());
    for (double& v : f.values) v /= m;
    return f;
}

} // namespace kg
