#pragma once

#include <cmath>
#include <stdexcept>

namespace levyvisc {

/// Convex, even approximation of |r| at scale xi.
///
/// Built from the base profile with beta''(r) = 2 (1 - |r|)_+, which gives
/// beta(r) = r^2 - |r|^3 / 3 on [-1, 1] and beta(r) = |r| - 1/3 outside.
/// The family is beta_xi(r) = xi * beta(r / xi). It is C^2, beta' saturates
/// at +-1 for |r| >= xi, and the certified constants are
///   M1 = sup_{|r|<=1} ||r| - beta(r)| = 1/3,
///   M2 = sup_{|r|<=1} |beta''(r)|     = 2.
class BetaFamily {
 public:
  static constexpr double kM1 = 1.0 / 3.0;
  static constexpr double kM2 = 2.0;

  explicit BetaFamily(double xi) : xi_(xi) {
    if (!(xi > 0.0) || !std::isfinite(xi)) {
      throw std::invalid_argument("BetaFamily: xi must be positive and finite");
    }
  }

  double xi() const { return xi_; }
  double M1() const { return kM1; }
  double M2() const { return kM2; }

  double beta(double r) const { return xi_ * base(r / xi_); }
  double beta_prime(double r) const { return base_prime(r / xi_); }
  double beta_double_prime(double r) const { return base_double_prime(r / xi_) / xi_; }

  static double base(double r) {
    const double a = std::abs(r);
    if (a >= 1.0) return a - 1.0 / 3.0;
    return a * a - a * a * a / 3.0;
  }

  static double base_prime(double r) {
    const double a = std::abs(r);
    const double mag = a >= 1.0 ? 1.0 : 2.0 * a - a * a;
    return r < 0.0 ? -mag : mag;
  }

  static double base_double_prime(double r) {
    const double a = std::abs(r);
    return a >= 1.0 ? 0.0 : 2.0 * (1.0 - a);
  }

 private:
  double xi_;
};

inline BetaFamily make_beta_family(double xi) { return BetaFamily(xi); }

}  // namespace levyvisc
