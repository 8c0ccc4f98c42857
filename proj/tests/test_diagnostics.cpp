#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kg/diagnostics.hpp"
#include "kg/quadrature.hpp"

using namespace kg;

TEST_CASE("growth_rate_fit") {
    SUBCASE("exact exponential data") {
        std::vector<double> t, y;
        for (int k = 0; k <= 400; ++k) {
            t.push_back(0.05 * k);
            y.push_back(std::exp(0.1 * t.back()));
        }
        const GrowthReport rep = growth_rate_fit(y, t);
        CHECK(rep.fit_valid);
        CHECK(rep.gamma_hat == doctest::Approx(0.1).epsilon(1e-10));
        CHECK(rep.r_squared == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(rep.monotone);
    }
    SUBCASE("constant series fits zero") {
        std::vector<double> t, y;
        for (int k = 0; k <= 100; ++k) {
            t.push_back(k);
            y.push_back(2.5);
        }
        const GrowthReport rep = growth_rate_fit(y, t);
        CHECK(rep.fit_valid);
        CHECK(rep.gamma_hat == doctest::Approx(0.0));
    }
    SUBCASE("nonpositive values in the window disable the fit") {
        std::vector<double> t, y;
        for (int k = 0; k <= 100; ++k) {
            t.push_back(k);
            y.push_back(k < 90 ? 1.0 : 0.0);
        }
        const GrowthReport rep = growth_rate_fit(y, t);
        CHECK_FALSE(rep.fit_valid);
    }
}

TEST_CASE("pareto_fit") {
    SUBCASE("exact power law is recovered to round-off") {
        const double k = 2.0, theta = 0.5;
        std::vector<double> x, cdf;
        for (int i = 0; i <= 200; ++i) {
            const double xi = std::pow(10.0, 1.0 + 2.0 * i / 200.0);
            x.push_back(xi);
            cdf.push_back(1.0 - k * std::pow(xi, -1.0 / theta));
        }
        const ParetoFit fit = pareto_fit(x, cdf, std::make_pair(10.0, 1000.0));
        CHECK(fit.theta_hat == doctest::Approx(theta).epsilon(1e-10));
        CHECK(fit.k_hat == doctest::Approx(k).epsilon(1e-9));
        CHECK(fit.residual < 1e-10);
    }
    SUBCASE("pareto-tailed cdf on the default window") {
        const double k = 2.0, theta = 0.5;
        std::vector<double> x, cdf;
        for (int i = 0; i <= 400; ++i) {
            const double xi = std::pow(10.0, 0.5 + 3.5 * i / 400.0);
            x.push_back(xi);
            cdf.push_back(1.0 / (1.0 + k * std::pow(xi, -1.0 / theta)));
        }
        const ParetoFit fit = pareto_fit(x, cdf);
        CHECK(std::abs(fit.theta_hat - theta) < 0.02 * theta);
        CHECK(std::abs(fit.k_hat - k) < 0.02 * k);
    }
    SUBCASE("gaussian tail leaves a visible residual") {
        std::vector<double> x, cdf;
        for (int i = 0; i <= 300; ++i) {
            const double xi = 1.0 + 0.05 * i;
            x.push_back(xi);
            cdf.push_back(1.0 - std::exp(-xi * xi));
        }
        const ParetoFit fit = pareto_fit(x, cdf, std::make_pair(1.0, 4.0));
        CHECK(fit.residual > 0.05); // log-log curvature shows up as rms residual
    }
    SUBCASE("narrow window rejected") {
        std::vector<double> x = {1, 2, 3, 4, 5}, cdf = {0.1, 0.2, 0.3, 0.4, 0.5};
        CHECK_THROWS_AS((void)pareto_fit(x, cdf, std::make_pair(1.0, 5.0)),
                        std::invalid_argument);
    }
}

TEST_CASE("front_speed on synthetic fronts") {
    KppTrace trace;
    const std::size_t n = 500;
    trace.y.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) trace.y[i] = -10.0 + 0.05 * i;
    auto front = [&](double c, double t, bool reflected) {
        std::vector<double> g(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            const double arg = reflected ? -(trace.y[i] + c * t) : trace.y[i] - c * t;
            g[i] = 1.0 / (1.0 + std::exp(3.0 * arg));
        }
        return g;
    };
    SUBCASE("rigid translation is measured exactly") {
        const double c = 0.1;
        for (int k = 0; k <= 20; ++k) {
            trace.snapshot_times.push_back(k * 1.0);
            trace.g_snapshots.push_back(front(c, k * 1.0, false));
        }
        CHECK(front_speed(trace) == doctest::Approx(c).epsilon(1e-6));
    }
    SUBCASE("reflected fronts give the negative speed") {
        const double c = 0.1;
        for (int k = 0; k <= 20; ++k) {
            trace.snapshot_times.push_back(k * 1.0);
            trace.g_snapshots.push_back(front(c, -k * 1.0, false));
        }
        CHECK(front_speed(trace) == doctest::Approx(-c).epsilon(1e-6));
    }
    SUBCASE("non-monotone snapshot is named") {
        for (int k = 0; k <= 5; ++k) {
            trace.snapshot_times.push_back(k);
            trace.g_snapshots.push_back(front(0.1, k, false));
        }
        trace.g_snapshots[3][200] = 0.0;
        trace.g_snapshots[3][201] = 1.0;
        try {
            (void)front_speed(trace);
            FAIL("expected a throw");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find('3') != std::string::npos);
        }
    }
}

TEST_CASE("degeneracy_check on synthetic traces") {
    UniformGrid g(20.0, 200);
    TdTrace trace;
    trace.times = {0, 1, 2, 3, 4, 5, 6, 7};
    trace.production = {1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7};

    SUBCASE("mass away from the origin is healthy") {
        trace.f_snapshots.push_back(gaussian_density(g, 5.0, 1.0));
        const DegeneracyReport rep = degeneracy_check(trace);
        CHECK_FALSE(rep.degenerate);
        CHECK(rep.low_mass_fraction < 0.01);
    }
    SUBCASE("collapsed mass flags") {
        trace.f_snapshots.push_back(gaussian_density(g, 0.0, 0.1));
        const DegeneracyReport rep = degeneracy_check(trace);
        CHECK(rep.degenerate);
        CHECK(rep.low_mass_fraction > 0.9);
    }
    SUBCASE("strictly falling production flags") {
        trace.f_snapshots.push_back(gaussian_density(g, 5.0, 1.0));
        trace.production = {1.0, 1.1, 1.2, 1.3, 1.4, 1.3, 1.2, 1.1};
        const DegeneracyReport rep = degeneracy_check(trace);
        CHECK(rep.degenerate);
        CHECK(rep.production_decreasing);
    }
}

TEST_CASE("degeneracy flags are stable under grid refinement") {
    // reduced-scale versions of the two canonical runs
    auto flag_at = [](std::size_t cells, double nu) {
        TdConfig cfg;
        cfg.grid = UniformGrid(20.0, cells);
        cfg.tau = 0.1;
        cfg.horizon = 60.0;
        cfg.nu = nu;
        cfg.r = 0.05;
        cfg.lf = LearningFunction::power(0.075, 0.3);
        cfg.max_outer = 60;
        const TdTrace trace = run_td(cfg, gaussian_density(cfg.grid));
        return degeneracy_check(trace).degenerate;
    };
    CHECK(flag_at(250, 0.005) == flag_at(500, 0.005));
    CHECK(flag_at(250, 0.125) == flag_at(500, 0.125));
    CHECK_FALSE(flag_at(500, 0.005));
    CHECK(flag_at(500, 0.125));
}

TEST_CASE("production_series on a synthetic trace") {
    UniformGrid g(1.0, 100);
    TdTrace trace;
    DensityProfile f{g, std::vector<double>(g.n_nodes(), 1.0)};

    SUBCASE("always learning produces nothing") {
        trace.f_snapshots.push_back(f);
        trace.s_snapshots.push_back({g, std::vector<double>(g.n_nodes(), 1.0)});
        trace.v_snapshots.push_back({g, std::vector<double>(g.n_nodes(), 0.0)});
        const auto y = production_series(trace);
        CHECK(y.size() == 1);
        CHECK(y[0] == doctest::Approx(0.0));
    }
    SUBCASE("uniform density with no learning integrates the first moment") {
        trace.f_snapshots.push_back(f);
        trace.s_snapshots.push_back({g, std::vector<double>(g.n_nodes(), 0.0)});
        trace.v_snapshots.push_back({g, std::vector<double>(g.n_nodes(), 0.0)});
        const auto y = production_series(trace);
        CHECK(y[0] == doctest::Approx(0.5).epsilon(1e-12));
    }
}
