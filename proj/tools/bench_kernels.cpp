// Times the production kernels (OpenMP maps over serial scans) against the
// serial reference implementations at a few grid sizes. The reference B and
// collision kernels are O(N^2) nodewise quadratures, so they only run at the
// smaller sizes; the pointwise kernels compare one-to-one.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kg/kernels.hpp"
#include "kg/learning.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock_type::now();
        fn();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

std::vector<double> random_vec(std::size_t n, unsigned seed, double lo, double hi) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("openmp enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("openmp disabled (serial build)\n");
#endif
    const kg::LearningFunction lf = kg::LearningFunction::power(0.075, 0.3);
    const double h = 1e-3;

    std::printf("%-18s %10s %12s %12s %9s\n", "kernel", "n", "serial[s]", "parallel[s]",
                "speedup");
    for (std::size_t n : {std::size_t(100000), std::size_t(1000000), std::size_t(4000000)}) {
        const std::vector<double> x = random_vec(n, 1, 0.0, 20.0);
        const std::vector<double> b = random_vec(n, 2, -2.0, 5.0);
        const std::vector<double> f = random_vec(n, 3, 0.0, 1.0);
        std::vector<double> out(n);

        const double ts = time_best_of(3, [&] { kg::kernels::serial::policy_map(x, b, lf, out); });
        const double tp = time_best_of(3, [&] { kg::kernels::policy_map(x, b, lf, out); });
        std::printf("%-18s %10zu %12.4f %12.4f %8.2fx\n", "policy_map", n, ts, tp, ts / tp);

        const double rs =
            time_best_of(3, [&] { kg::kernels::serial::logistic_reaction(f, 0.01, out); });
        const double rp = time_best_of(3, [&] { kg::kernels::logistic_reaction(f, 0.01, out); });
        std::printf("%-18s %10zu %12.4f %12.4f %8.2fx\n", "logistic_reaction", n, rs, rp,
                    rs / rp);
    }

    // reference quadratures are quadratic; keep n modest
    for (std::size_t n : {std::size_t(2000), std::size_t(8000)}) {
        const std::vector<double> v = random_vec(n, 4, 0.0, 100.0);
        const std::vector<double> phi = random_vec(n, 5, 0.0, 1.0);
        const std::vector<double> as = random_vec(n, 6, 0.0, 0.075);

        const double ts =
            time_best_of(3, [&] { (void)kg::kernels::serial::b_values(v, phi, h); });
        const double tp = time_best_of(3, [&] { (void)kg::kernels::b_values(v, phi, h); });
        std::printf("%-18s %10zu %12.4f %12.4f %8.2fx  (reference is O(n^2))\n", "b_values", n,
                    ts, tp, ts / tp);

        const double cs =
            time_best_of(3, [&] { (void)kg::kernels::serial::collision_rhs(phi, as, h); });
        const double cp = time_best_of(3, [&] { (void)kg::kernels::collision_rhs(phi, as, h); });
        std::printf("%-18s %10zu %12.4f %12.4f %8.2fx  (reference is O(n^2))\n",
                    "collision_rhs", n, cs, cp, cs / cp);
    }
    return 0;
}
