#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kg/analytic.hpp"
#include "kg/kpp.hpp"
#include "kg/quadrature.hpp"
#include "kg/td_solver.hpp"

using namespace kg;

namespace {

TdConfig small_config() {
    TdConfig cfg;
    cfg.grid = UniformGrid(20.0, 400);
    cfg.tau = 0.05;
    cfg.horizon = 5.0;
    cfg.nu = 0.005;
    cfg.r = 0.05;
    cfg.lf = LearningFunction::power(0.075, 0.3);
    return cfg;
}

PolicyProfile zero_policy(const UniformGrid& g) {
    return {g, std::vector<double>(g.n_nodes(), 0.0)};
}

} // namespace

TEST_CASE("no dynamics without diffusion and learning") {
    TdConfig cfg = small_config();
    cfg.nu = 0.0;
    const DensityProfile f0 = gaussian_density(cfg.grid);
    const DensityProfile f1 = boltzmann_step(f0, zero_policy(cfg.grid), cfg);
    for (std::size_t i = 0; i < f0.values.size(); ++i)
        CHECK(f1.values[i] == doctest::Approx(f0.values[i]).epsilon(1e-13));
}

TEST_CASE("boltzmann step conserves mass") {
    TdConfig cfg = small_config();
    DensityProfile f = gaussian_density(cfg.grid);
    PolicyProfile s{cfg.grid, std::vector<double>(cfg.grid.n_nodes(), 0.6)};
    const double m0 = mass(f);
    for (int k = 0; k < 50; ++k) f = boltzmann_step(f, s, cfg);
    CHECK(std::abs(mass(f) - m0) < 1e-12);
}

TEST_CASE("constant-alpha stepping follows the logistic oracle per step") {
    TdConfig cfg = small_config();
    cfg.nu = 0.0;
    cfg.tau = 1e-3;
    cfg.lf = LearningFunction::constant(0.075);
    DensityProfile f = gaussian_density(cfg.grid);
    const CdfProfile f0_cdf = cdf_from_density(f);
    const int steps = 400;
    for (int k = 0; k < steps; ++k) f = boltzmann_step(f, zero_policy(cfg.grid), cfg);
    const CdfProfile now = cdf_from_density(f);
    const double t = steps * cfg.tau;
    for (std::size_t i = 0; i < now.values.size(); i += 7) {
        const double oracle = logistic_cdf(f0_cdf.values[i], 0.075, t);
        CHECK(std::abs(now.values[i] - oracle) < 5e-4 * t + 1e-6);
    }
}

TEST_CASE("hjb stepping relaxes toward x/r without learning") {
    TdConfig cfg = small_config();
    cfg.nu = 0.0;
    cfg.tau = 0.05;
    const DensityProfile f = gaussian_density(cfg.grid);
    const PolicyProfile s = zero_policy(cfg.grid);
    ValueProfile v{cfg.grid, std::vector<double>(cfg.grid.n_nodes(), 0.0)};
    // T >> 1/r so the discounted backward recursion saturates
    const int steps = static_cast<int>(400.0 / cfg.tau);
    for (int k = 0; k < steps; ++k) v = hjb_step_backward(v, f, s, cfg);
    for (std::size_t i = 0; i < v.values.size(); i += 17)
        CHECK(std::abs(v.values[i] - cfg.grid.node(i) / cfg.r) < 1e-4 * (1.0 + cfg.grid.node(i)));
}

TEST_CASE("hjb step respects the discounted bound for large r") {
    TdConfig cfg = small_config();
    cfg.r = 20.0;
    const DensityProfile f = gaussian_density(cfg.grid);
    const PolicyProfile s = zero_policy(cfg.grid);
    ValueProfile v{cfg.grid, std::vector<double>(cfg.grid.n_nodes(), 0.0)};
    for (int k = 0; k < 400; ++k) {
        v = hjb_step_backward(v, f, s, cfg);
        for (double val : v.values) CHECK(val <= cfg.grid.x_max / cfg.r + cfg.tau * cfg.grid.x_max);
    }
}

TEST_CASE("one backward step from zero terminal data is the scaled Hamiltonian") {
    TdConfig cfg = small_config();
    cfg.nu = 0.0;
    const DensityProfile f = gaussian_density(cfg.grid);
    PolicyProfile s{cfg.grid, std::vector<double>(cfg.grid.n_nodes(), 0.5)};
    ValueProfile v0{cfg.grid, std::vector<double>(cfg.grid.n_nodes(), 0.0)};
    const ValueProfile v = hjb_step_backward(v0, f, s, cfg);
    // V^k = tau/(1+tau r) * H; with V^{k+1} = 0 the B term vanishes
    for (std::size_t i = 0; i < v.values.size(); i += 29) {
        const double ham = 0.5 * cfg.grid.node(i);
        CHECK(v.values[i] ==
              doctest::Approx(cfg.tau * ham / (1.0 + cfg.tau * cfg.r)).epsilon(1e-12));
        CHECK(v.values[i] >= 0.0);
    }
}

TEST_CASE("run_td on the decoupled constant-alpha system matches the oracle") {
    TdConfig cfg;
    cfg.grid = UniformGrid(10.0, 500);
    cfg.tau = 0.01;
    cfg.horizon = 5.0;
    cfg.nu = 0.0;
    cfg.r = 0.05;
    cfg.lf = LearningFunction::constant(0.075);
    cfg.snapshot_stride = 100;
    const DensityProfile f0 = gaussian_density(cfg.grid);
    const CdfProfile cdf0 = cdf_from_density(f0);
    const TdTrace trace = run_td(cfg, f0);
    CHECK(trace.converged);
    CHECK(trace.outer_iterations <= 3);
    for (std::size_t j = 0; j < trace.snapshot_times.size(); ++j) {
        const CdfProfile c = cdf_from_density(trace.f_snapshots[j]);
        const double t = trace.snapshot_times[j];
        for (std::size_t i = 0; i < c.values.size(); i += 11)
            CHECK(std::abs(c.values[i] - logistic_cdf(cdf0.values[i], 0.075, t)) < 2e-3);
    }
    for (double m : trace.total_mass) CHECK(std::abs(m - 1.0) < 1e-10);
}

TEST_CASE("run_td records production and stays nonnegative on the coupled run") {
    TdConfig cfg = small_config();
    cfg.horizon = 10.0;
    cfg.max_outer = 60;
    const TdTrace trace = run_td(cfg, gaussian_density(cfg.grid));
    CHECK(trace.converged);
    CHECK(trace.production.size() == trace.times.size());
    for (double y : trace.production) CHECK(y >= 0.0);
    CHECK(trace.min_density >= -1e-12);
    CHECK(trace.policy_monotone);
    for (double m : trace.total_mass) CHECK(std::abs(m - 1.0) < 1e-10);
}

TEST_CASE("kpp run guards and basic behavior") {
    KppConfig cfg;
    cfg.nu = 0.01;
    cfg.alpha0 = 0.075;
    cfg.y_min = -10.0;
    cfg.y_max = 10.0;
    cfg.n_cells = 400;
    cfg.tau = 0.5;
    cfg.horizon = 20.0;

    SUBCASE("reaction guard") {
        KppConfig bad = cfg;
        bad.tau = 10.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }
    SUBCASE("pure diffusion does not increase total variation") {
        KppConfig diff = cfg;
        diff.alpha0 = 1e-12; // reaction effectively off
        const KppTrace trace = kpp_run(diff, kpp_step_front(diff));
        auto tv = [](const std::vector<double>& g) {
            double s = 0.0;
            for (std::size_t i = 1; i < g.size(); ++i) s += std::abs(g[i] - g[i - 1]);
            return s;
        };
        const double tv0 = tv(trace.g_snapshots.front());
        for (const auto& g : trace.g_snapshots) CHECK(tv(g) <= tv0 + 1e-9);
    }
    SUBCASE("pure reaction grows G toward 1") {
        KppConfig react = cfg;
        react.nu = 0.0;
        std::vector<double> g0(react.n_cells + 1);
        for (std::size_t i = 0; i < g0.size(); ++i)
            g0[i] = 1.0 - static_cast<double>(i) / react.n_cells;
        const KppTrace trace = kpp_run(react, g0);
        const auto& last = trace.g_snapshots.back();
        for (std::size_t i = 1; i + 1 < last.size(); i += 13) {
            CHECK(last[i] > g0[i]); // interior points move up
            CHECK(last[i] <= 1.0 + 1e-12);
        }
    }
    SUBCASE("front near the boundary raises the truncation warning") {
        KppConfig tight = cfg;
        tight.y_min = -0.5;
        tight.y_max = 10.0;
        tight.n_cells = 200;
        const KppTrace trace = kpp_run(tight, kpp_step_front(tight));
        CHECK(trace.truncation_warning);
    }
}

TEST_CASE("kpp front position moves right monotonically") {
    KppConfig cfg;
    cfg.nu = 0.005;
    cfg.alpha0 = 0.075;
    cfg.y_min = -10.0;
    cfg.y_max = 20.0;
    cfg.n_cells = 1200;
    cfg.tau = 0.5;
    cfg.horizon = 100.0;
    const KppTrace trace = kpp_run(cfg, kpp_step_front(cfg));
    double prev = -1e300;
    for (const auto& g : trace.g_snapshots) {
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            if (g[i] >= 0.5 && g[i + 1] < 0.5) {
                const double t = (g[i] - 0.5) / (g[i] - g[i + 1]);
                const double pos = trace.y[i] + t * (trace.y[i + 1] - trace.y[i]);
                CHECK(pos >= prev - 1e-12);
                prev = pos;
                break;
            }
        }
    }
}
