#include "kg/tridiag.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace kg {

std::vector<double> solve_tridiagonal(const Tridiagonal& m, std::span<const double> rhs) {
    const std::size_t n = m.size();
    if (rhs.size() != n) throw std::invalid_argument("solve_tridiagonal: rhs size mismatch");
    if (n == 0) return {};
    std::vector<double> c(n, 0.0), x(n);
    double piv = m.diag[0];
    if (piv == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot at row 0");
    c[0] = m.upper[0] / piv;
    x[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = m.diag[i] - m.lower[i] * c[i - 1];
        if (piv == 0.0)
            throw std::runtime_error("solve_tridiagonal: zero pivot at row " + std::to_string(i));
        if (i + 1 < n) c[i] = m.upper[i] / piv;
        x[i] = (rhs[i] - m.lower[i] * x[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
}

BandedLU::BandedLU(const Tridiagonal& m) : n_(m.size()) {
    // Gaussian elimination with partial pivoting on a tridiagonal band.
    // A row swap stores the lower row as the pivot row, which carries its
    // upper entry into the second superdiagonal (u2); working rows stay
    // two-entry wide throughout.
    d_.assign(n_, 0.0);
    u1_.assign(n_, 0.0);
    u2_.assign(n_, 0.0);
    l_.assign(n_, 0.0);
    swapped_.assign(n_, false);

    std::vector<double> a = m.diag, b = m.upper;

    for (std::size_t k = 0; k + 1 < n_; ++k) {
        const double below = m.lower[k + 1];
        double elim, row_b1, row_b2;
        if (std::abs(below) > std::abs(a[k])) {
            swapped_[k] = true;
            d_[k] = below;
            u1_[k] = a[k + 1];
            u2_[k] = b[k + 1];
            elim = a[k];
            row_b1 = b[k];
            row_b2 = 0.0;
        } else {
            d_[k] = a[k];
            u1_[k] = b[k];
            u2_[k] = 0.0;
            elim = below;
            row_b1 = a[k + 1];
            row_b2 = b[k + 1];
        }
        if (d_[k] == 0.0)
            throw std::runtime_error("BandedLU: singular matrix at column " + std::to_string(k));
        const double mult = elim / d_[k];
        l_[k] = mult;
        a[k + 1] = row_b1 - mult * u1_[k];
        b[k + 1] = row_b2 - mult * u2_[k];
    }
    d_[n_ - 1] = a[n_ - 1];
    if (d_[n_ - 1] == 0.0)
        throw std::runtime_error("BandedLU: singular matrix at last column");
}

std::vector<double> BandedLU::solve(std::span<const double> rhs) const {
    if (rhs.size() != n_) throw std::invalid_argument("BandedLU::solve: rhs size mismatch");
    std::vector<double> y(rhs.begin(), rhs.end());
    for (std::size_t k = 0; k + 1 < n_; ++k) {
        if (swapped_[k]) std::swap(y[k], y[k + 1]);
        y[k + 1] -= l_[k] * y[k];
    }
    std::vector<double> x(n_);
    for (std::size_t i = n_; i-- > 0;) {
        double s = y[i];
        if (i + 1 < n_) s -= u1_[i] * x[i + 1];
        if (i + 2 < n_) s -= u2_[i] * x[i + 2];
        x[i] = s / d_[i];
    }
    return x;
}

BorderedSolution solve_bordered(const Tridiagonal& a, std::span<const double> c,
                                std::span<const double> r, std::span<const double> b,
                                double beta) {
    const std::size_t n = a.size();
    if (c.size() != n || r.size() != n || b.size() != n)
        throw std::invalid_argument("solve_bordered: size mismatch");
    BandedLU lu(a);
    std::vector<double> y = lu.solve(b);
    std::vector<double> u = lu.solve(c);
    double ry = 0.0, ru = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ry += r[i] * y[i];
        ru += r[i] * u[i];
    }
    if (ru == 0.0 || !std::isfinite(ru))
        throw std::runtime_error("solve_bordered: singular Schur complement");
    const double lambda = (ry - beta) / ru;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - lambda * u[i];
    return {std::move(x), lambda};
}

} // namespace kg
