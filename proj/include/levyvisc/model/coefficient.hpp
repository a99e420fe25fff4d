#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace levyvisc {

/// Evaluation-only scalar coefficient u -> c(u), optionally depending on the
/// position x. Used for the flux f, the diffusion A and the Brownian
/// coefficient sigma.
struct CoefficientFn {
  std::function<double(double x, double u)> eval;
  double lipschitz = 0.0;  // declared Lipschitz constant in u
  std::optional<double> second_derivative_bound;
  bool x_dependent = false;
  double lipschitz_x = 0.0;  // declared Lipschitz constant in x (B31)
  std::string name = "custom";

  double operator()(double u) const { return eval(0.0, u); }
  double operator()(double x, double u) const { return eval(x, u); }

  bool is_zero() const { return name == "zero"; }

  static CoefficientFn from_u(std::function<double(double)> fn, double lip,
                              std::optional<double> second = std::nullopt,
                              std::string name = "custom") {
    CoefficientFn c;
    c.eval = [fn = std::move(fn)](double, double u) { return fn(u); };
    c.lipschitz = lip;
    c.second_derivative_bound = second;
    c.name = std::move(name);
    return c;
  }

  static CoefficientFn zero() {
    CoefficientFn c;
    c.eval = [](double, double) { return 0.0; };
    c.second_derivative_bound = 0.0;
    c.name = "zero";
    return c;
  }
};

/// Jump coefficient eta(x, u; z).
struct JumpCoefficient {
  std::function<double(double x, double u, double z)> eval;
  double lambda_star = 0.0;  // Lipschitz constant in u per unit (|z| ^ 1)
  double growth = 0.0;       // C in |eta(u;z)| <= C |u| (|z| ^ 1)
  bool x_dependent = false;
  double lipschitz_x = 0.0;  // K2 in B3
  std::optional<std::function<double(double)>> envelope;  // g(x) in B4
  std::string name = "custom";

  double operator()(double u, double z) const { return eval(0.0, u, z); }
  double operator()(double x, double u, double z) const { return eval(x, u, z); }

  bool is_zero() const { return name == "zero"; }

  static JumpCoefficient zero() {
    JumpCoefficient j;
    j.eval = [](double, double, double) { return 0.0; };
    j.name = "zero";
    return j;
  }
};

inline double jump_cap(double z) { return std::min(std::abs(z), 1.0); }

/// Central difference with step 1e-5 * max(1, |u|).
inline double derivative(const std::function<double(double)>& fn, double u) {
  const double h = 1e-5 * std::max(1.0, std::abs(u));
  return (fn(u + h) - fn(u - h)) / (2.0 * h);
}

inline double derivative(const CoefficientFn& c, double u) {
  const double h = 1e-5 * std::max(1.0, std::abs(u));
  return (c(u + h) - c(u - h)) / (2.0 * h);
}

inline double second_derivative(const CoefficientFn& c, double u) {
  const double h = 1e-4 * std::max(1.0, std::abs(u));
  return (c(u + h) - 2.0 * c(u) + c(u - h)) / (h * h);
}

}  // namespace levyvisc
