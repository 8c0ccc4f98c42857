#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kg/kernels.hpp"
#include "kg/maximizer.hpp"

using namespace kg;

namespace {

double objective(double s, double x, double b, const LearningFunction& lf) {
    return (1.0 - s) * x + lf.alpha(s) * b;
}

// independent oracle: exhaustive search over a uniform s grid
double grid_search_best(double x, double b, const LearningFunction& lf, int points = 2001) {
    double best = -1e300;
    for (int i = 0; i < points; ++i) {
        const double s = static_cast<double>(i) / (points - 1);
        best = std::max(best, objective(s, x, b, lf));
    }
    return best;
}

} // namespace

TEST_CASE("three-case structure") {
    auto lf = LearningFunction::power(0.075, 0.3);

    SUBCASE("nonpositive B never learns") {
        const auto c = optimal_control(1.0, -1.0, lf);
        CHECK(c.regime == ControlRegime::ZeroB);
        CHECK(c.s == 0.0);
        // tie at the origin resolves to zero
        const auto t = optimal_control(0.0, 0.0, lf);
        CHECK(t.s == 0.0);
    }
    SUBCASE("large B saturates") {
        // B alpha'(1) = 100*0.0225 = 2.25 >= x = 1
        const auto c = optimal_control(1.0, 100.0, lf);
        CHECK(c.regime == ControlRegime::Saturated);
        CHECK(c.s == 1.0);
    }
    SUBCASE("interior closed form") {
        auto lf2 = LearningFunction::power(1.0, 0.5);
        const auto c = optimal_control(1.0, 1.0, lf2);
        CHECK(c.regime == ControlRegime::Interior);
        CHECK(c.s == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(objective(c.s, 1.0, 1.0, lf2) >= grid_search_best(1.0, 1.0, lf2) - 1e-9);
    }
    SUBCASE("negative x rejected") {
        CHECK_THROWS_AS(optimal_control(-1.0, 0.5, lf), std::domain_error);
    }
}

TEST_CASE("argmax optimality on 1000 random tuples") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ux(1e-6, 10.0);
    std::uniform_real_distribution<double> ub(-5.0, 5.0);
    std::uniform_real_distribution<double> ua(1e-3, 1.0);
    std::uniform_real_distribution<double> un(0.1, 0.9);
    for (int rep = 0; rep < 1000; ++rep) {
        const double x = ux(rng), b = ub(rng);
        auto lf = LearningFunction::power(ua(rng), un(rng));
        const auto c = optimal_control(x, b, lf);
        CHECK(c.s >= 0.0);
        CHECK(c.s <= 1.0);
        CHECK(objective(c.s, x, b, lf) >= grid_search_best(x, b, lf) - 1e-9);
    }
}

TEST_CASE("monotone and continuous in B") {
    auto lf = LearningFunction::power(0.5, 0.4);
    const double x = 2.0;
    double prev = 0.0;
    for (double b = -1.0; b < 30.0; b += 0.05) {
        const double s = optimal_control(x, b, lf).s;
        CHECK(s >= prev - 1e-12);
        prev = s;
    }
    // continuity sweeps at the two case boundaries
    const double b_edge = x / lf.alpha_prime(1.0);
    for (double d : {1e-4, 1e-6, 1e-8}) {
        CHECK(std::abs(optimal_control(x, b_edge + d, lf).s -
                       optimal_control(x, b_edge - d, lf).s) < 50.0 * d);
        CHECK(std::abs(optimal_control(x, d, lf).s - optimal_control(x, 0.0, lf).s) < 1e-3);
    }
    // at the exact saturation boundary the interior formula touches s = 1
    const auto c = optimal_control(x, b_edge, lf);
    CHECK(c.s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bisection variant agrees with the closed form") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ux(1e-3, 8.0);
    std::uniform_real_distribution<double> ub(1e-3, 5.0);
    for (int rep = 0; rep < 200; ++rep) {
        auto lf = LearningFunction::power(0.3, 0.35);
        const double x = ux(rng), b = ub(rng);
        const auto a = optimal_control(x, b, lf);
        const auto c = optimal_control_bisect(x, b, lf);
        CHECK(a.s == doctest::Approx(c.s).epsilon(1e-9));
    }
}

TEST_CASE("policy_from_b") {
    UniformGrid g(1.0, 200);
    auto lf = LearningFunction::power(1.0, 0.5);

    SUBCASE("zero B gives the zero policy") {
        std::vector<double> b(g.n_nodes(), 0.0);
        const PolicyProfile s = policy_from_b(b, g, lf);
        for (double v : s.values) CHECK(v == 0.0);
    }
    SUBCASE("x=0 node saturates when B is positive") {
        std::vector<double> b(g.n_nodes(), 0.125);
        const PolicyProfile s = policy_from_b(b, g, lf);
        CHECK(s.values[0] == 1.0);
    }
    SUBCASE("monotone B from monotone v yields a non-increasing policy") {
        std::vector<double> v(g.n_nodes()), phi(g.n_nodes(), 1.0);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = g.node(i);
        const auto b = kernels::b_values(v, phi, g.spacing());
        const PolicyProfile s = policy_from_b(b, g, lf);
        CHECK(is_nonincreasing(s.values, 1e-12));
        // interior value at x = 0.5: B = 0.125, s = (0.5*0.125/0.5)^2
        const std::size_t mid = 100;
        CHECK(s.values[mid] == doctest::Approx(0.015625).epsilon(1e-6));
    }
}

TEST_CASE("find_x0") {
    UniformGrid g(1.0, 4000);
    auto lf = LearningFunction::power(1.0, 0.5); // alpha'(1) = 0.5

    SUBCASE("zero B sits at the origin") {
        std::vector<double> b(g.n_nodes(), 0.0);
        CHECK(find_x0(b, g, lf).x0 == 0.0);
    }
    SUBCASE("constant B solves g linearly") {
        std::vector<double> b(g.n_nodes(), 0.4);
        CHECK(find_x0(b, g, lf).x0 == doctest::Approx(0.2).epsilon(1e-9));
    }
    SUBCASE("quadratic B against the exact root") {
        std::vector<double> b(g.n_nodes());
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double x = g.node(i);
            b[i] = 0.5 * (1.0 - x) * (1.0 - x);
        }
        // (1-x)^2/4 = x  =>  x0 = 3 - 2 sqrt(2)
        CHECK(find_x0(b, g, lf).x0 ==
              doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-6));
    }
}
