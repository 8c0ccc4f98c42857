#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kg {

/// Tridiagonal matrix in band storage; lower[0] and upper[n-1] are unused.
struct Tridiagonal {
    std::vector<double> lower, diag, upper;

    explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
    std::size_t size() const { return diag.size(); }
};

/// Thomas elimination without pivoting. Throws std::runtime_error on a
/// vanishing pivot. O(n).
std::vector<double> solve_tridiagonal(const Tridiagonal& m, std::span<const double> rhs);

/// Banded LU with partial pivoting (row swaps within the bandwidth-1 reach,
/// one fill superdiagonal). Needed where the plain Thomas pivot vanishes
/// structurally, e.g. the nu=0 advection rows.
class BandedLU {
public:
    explicit BandedLU(const Tridiagonal& m);
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    std::size_t n_;
    std::vector<double> d_, u1_, u2_; // pivoted U bands
    std::vector<double> l_;           // multipliers
    std::vector<bool> swapped_;
};

/// Solution of the bordered system
///   A x + lambda c = b,   r . x = beta,
/// by block elimination over a pivoted banded factorization of A.
/// Throws std::runtime_error when A or the Schur complement is singular.
struct BorderedSolution {
    std::vector<double> x;
    double lambda;
};
BorderedSolution solve_bordered(const Tridiagonal& a, std::span<const double> c,
                                std::span<const double> r, std::span<const double> b,
                                double beta);

} // namespace kg
