#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace kg {

/// Uniform discretization of the knowledge interval [0, x_max].
/// Nodes sit at x_i = i*h, h = x_max / n_cells, i = 0..n_cells.
struct UniformGrid {
    double x_max = 0.0;
    std::size_t n_cells = 0;

    UniformGrid() = default;
    UniformGrid(double xmax, std::size_t cells) : x_max(xmax), n_cells(cells) {
        if (!(x_max > 0.0))
            throw std::invalid_argument("UniformGrid: x_max must be positive");
        if (n_cells < 2)
            throw std::invalid_argument("UniformGrid: need at least 2 cells");
    }

    double spacing() const { return x_max / static_cast<double>(n_cells); }
    std::size_t n_nodes() const { return n_cells + 1; }
    double node(std::size_t i) const { return static_cast<double>(i) * spacing(); }

    std::vector<double> nodes() const {
        std::vector<double> xs(n_nodes());
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = node(i);
        return xs;
    }

    bool operator==(const UniformGrid&) const = default;
};

} // namespace kg
