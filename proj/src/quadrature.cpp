#include "kg/quadrature.hpp"

#include <stdexcept>

#include "kg/kernels.hpp"

namespace kg {

double trapezoid(std::span<const double> values, double h) {
    if (values.size() < 2)
        throw std::invalid_argument("trapezoid: need at least 2 samples");
    if (!(h > 0.0))
        throw std::invalid_argument("trapezoid: spacing must be positive");
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
    return h * sum;
}

std::vector<double> prefix_trapezoid(std::span<const double> values, double h) {
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t i = 1; i < values.size(); ++i)
        out[i] = out[i - 1] + 0.5 * h * (values[i - 1] + values[i]);
    return out;
}

std::vector<double> suffix_trapezoid(std::span<const double> values, double h) {
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t i = values.size() - 1; i-- > 0;)
        out[i] = out[i + 1] + 0.5 * h * (values[i] + values[i + 1]);
    return out;
}

CdfProfile cdf_from_density(const DensityProfile& f) {
    require_aligned(f.grid, f.values.size(), "cdf_from_density");
    return CdfProfile{f.grid, prefix_trapezoid(f.values, f.grid.spacing())};
}

double mass(const DensityProfile& f) {
    require_aligned(f.grid, f.values.size(), "mass");
    return trapezoid(f.values, f.grid.spacing());
}

std::vector<double> b_functional(const ValueProfile& v, const DensityProfile& phi) {
    if (v.grid != phi.grid)
        throw std::invalid_argument("b_functional: value and density grids differ");
    require_aligned(v.grid, v.values.size(), "b_functional");
    require_aligned(phi.grid, phi.values.size(), "b_functional");
    return kernels::b_values(v.values, phi.values, v.grid.spacing());
}

} // namespace kg
