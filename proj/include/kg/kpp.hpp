#pragma once

#include <cstddef>
#include <vector>

namespace kg {

struct KppConfig {
    double nu = 0.005;
    double alpha0 = 0.075;
    double y_min = -15.0;
    double y_max = 80.0;
    std::size_t n_cells = 3800;
    double tau = 0.5;
    double horizon = 800.0;
    std::size_t snapshot_stride = 0; ///< 0 = ceil(n_steps/400)

    void validate() const; ///< enforces the reaction guard tau*alpha0 <= 0.25
    double spacing() const { return (y_max - y_min) / static_cast<double>(n_cells); }
    std::size_t n_steps() const;
};

struct KppTrace {
    std::vector<double> y;
    std::vector<double> snapshot_times;
    std::vector<std::vector<double>> g_snapshots;
    bool truncation_warning = false; ///< front came within 10 cells of a boundary
};

/// Step-front initial data: G = 1 left of y0, 0 right of it.
std::vector<double> kpp_step_front(const KppConfig& cfg, double y0 = 0.0);

/// Semi-implicit Fisher-KPP integration of dG/dt - nu G'' = alpha0 G(1-G):
/// implicit diffusion, explicit reaction, Dirichlet values 1 and 0 pinned at
/// the ends. g0 must be a monotone non-increasing front with values in [0,1].
KppTrace kpp_run(const KppConfig& cfg, const std::vector<double>& g0);

} // namespace kg
