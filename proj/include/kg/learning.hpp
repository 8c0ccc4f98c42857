#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace kg {

/// Learning function alpha(s): meeting probability for an agent spending the
/// fraction s of its time learning. Two forms:
///   power:    alpha(s) = alpha0 * s^n, 0 < n < 1  (alpha(0)=0, alpha'(0)=inf,
///             strictly increasing and concave on [0,1])
///   constant: alpha(s) = alpha0 for all s         (decouples the system)
class LearningFunction {
public:
    static LearningFunction power(double alpha0, double n_exp) {
        if (!(alpha0 > 0.0))
            throw std::invalid_argument("LearningFunction: alpha0 must be positive");
        if (!(n_exp > 0.0 && n_exp < 1.0))
            throw std::invalid_argument("LearningFunction: exponent must lie in (0,1)");
        return LearningFunction(alpha0, n_exp, false);
    }

    static LearningFunction constant(double alpha0) {
        if (!(alpha0 > 0.0))
            throw std::invalid_argument("LearningFunction: alpha0 must be positive");
        return LearningFunction(alpha0, 0.0, true);
    }

    double alpha(double s) const {
        check_domain(s);
        if (constant_) return alpha0_;
        return alpha0_ * std::pow(s, n_);
    }

    /// Derivative; reports +inf at s=0 for the power form (assumption (A3)).
    double alpha_prime(double s) const {
        check_domain(s);
        if (constant_) return 0.0;
        if (s == 0.0) return std::numeric_limits<double>::infinity();
        return alpha0_ * n_ * std::pow(s, n_ - 1.0);
    }

    /// (alpha(s), alpha'(s)) in one call.
    std::pair<double, double> eval(double s) const { return {alpha(s), alpha_prime(s)}; }

    double alpha0() const { return alpha0_; }
    double exponent() const { return n_; }
    bool is_constant() const { return constant_; }

private:
    LearningFunction(double a0, double n, bool c) : alpha0_(a0), n_(n), constant_(c) {}

    static void check_domain(double s) {
        if (!(s >= 0.0 && s <= 1.0))
            throw std::domain_error("LearningFunction: s must lie in [0,1]");
    }

    double alpha0_;
    double n_;
    bool constant_;
};

} // namespace kg
