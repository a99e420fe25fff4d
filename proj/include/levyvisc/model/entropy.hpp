#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levyvisc/model/beta_family.hpp"
#include "levyvisc/model/coefficient.hpp"
#include "levyvisc/model/quadrature.hpp"

namespace levyvisc {

class MonotonicityViolation : public std::domain_error {
 public:
  MonotonicityViolation(double witness, double slope)
      : std::domain_error("diffusion coefficient decreasing near u = " + std::to_string(witness) +
                          " (A' = " + std::to_string(slope) + ")"),
        witness_(witness) {}
  double witness() const { return witness_; }

 private:
  double witness_;
};

inline constexpr double kMonotonicityTolerance = 1e-8;

/// sqrt(A'(r)) with A' from central differences; throws on a decreasing A.
inline double sqrt_diffusion_slope(const CoefficientFn& A, double r) {
  const double slope = derivative(A, r);
  if (slope < -kMonotonicityTolerance) throw MonotonicityViolation(r, slope);
  return std::sqrt(std::max(slope, 0.0));
}

/// Kirchhoff function G(u) = int_0^u sqrt(A'(r)) dr.
inline double kirchhoff(const CoefficientFn& A, double u, const QuadratureConfig& cfg = {}) {
  if (A.is_zero()) return 0.0;
  return integrate([&](double r) { return sqrt_diffusion_slope(A, r); }, 0.0, u, cfg);
}

/// Doubled entropy flux c^beta(a, b) = int_b^a beta_xi'(r - b) c'(r) dr.
/// Serves f^beta, A^beta and B^beta alike.
inline double entropy_flux(const CoefficientFn& coeff, const BetaFamily& family, double a, double b,
                           const QuadratureConfig& cfg = {}) {
  if (a == b || coeff.is_zero()) return 0.0;
  const double xi = family.xi();
  return integrate_piecewise(
      [&](double r) { return family.beta_prime(r - b) * derivative(coeff, r); }, b, a,
      {b - xi, b, b + xi, 0.0}, cfg);
}

/// Primitive F(u) = int_anchor^u q(r) dr tabulated on a uniform grid and
/// evaluated by cubic Hermite interpolation (q supplies the slopes).
/// Outside the table it falls back to direct quadrature.
class TabulatedPrimitive {
 public:
  TabulatedPrimitive() = default;

  TabulatedPrimitive(std::function<double(double)> integrand, double anchor, double lo, double hi,
                     std::size_t intervals, std::vector<double> breaks, const QuadratureConfig& cfg = {})
      : q_(std::move(integrand)), anchor_(anchor), lo_(lo), hi_(hi), breaks_(std::move(breaks)), cfg_(cfg) {
    if (!(hi > lo) || intervals == 0) {
      throw std::invalid_argument("TabulatedPrimitive: empty range");
    }
    step_ = (hi - lo) / static_cast<double>(intervals);
    values_.resize(intervals + 1);
    slopes_.resize(intervals + 1);
    values_[0] = piece(anchor_, lo_);
    for (std::size_t i = 0; i <= intervals; ++i) {
      const double u = node(i);
      slopes_[i] = q_(u);
      if (i > 0) values_[i] = values_[i - 1] + piece(node(i - 1), u);
    }
  }

  bool empty() const { return values_.empty(); }

  double operator()(double u) const {
    if (values_.empty() || u == anchor_) return 0.0;
    if (u < lo_ || u > hi_) return piece(anchor_, u);
    auto i = static_cast<std::size_t>((u - lo_) / step_);
    i = std::min(i, values_.size() - 2);
    const double s = (u - node(i)) / step_;
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    return h00 * values_[i] + h10 * step_ * slopes_[i] + h01 * values_[i + 1] + h11 * step_ * slopes_[i + 1];
  }

 private:
  double node(std::size_t i) const { return lo_ + static_cast<double>(i) * step_; }

  double piece(double a, double b) const {
    if (a == b) return 0.0;
    const double lo = std::min(a, b), hi = std::max(a, b);
    std::vector<double> pts{lo};
    for (double p : breaks_) {
      if (p > lo && p < hi) pts.push_back(p);
    }
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) sum += integrate(q_, pts[k], pts[k + 1], cfg_);
    return a < b ? sum : -sum;
  }

  std::function<double(double)> q_;
  double anchor_ = 0.0, lo_ = 0.0, hi_ = 0.0, step_ = 1.0;
  std::vector<double> breaks_;
  QuadratureConfig cfg_;
  std::vector<double> values_, slopes_;
};

/// Convex entropy triple (beta_xi(. - k), zeta, nu) centred at the Kruzkov
/// constant k, with zeta' = beta' f' and nu' = beta' A', both vanishing at k.
/// zeta, nu and the Kirchhoff function G are tabulated over [lo, hi].
class EntropyTriple {
 public:
  EntropyTriple(BetaFamily family, double center, const CoefficientFn& flux, const CoefficientFn& diffusion,
                double lo, double hi, std::size_t intervals = 4096, const QuadratureConfig& cfg = {})
      : family_(family), center_(center) {
    const double xi = family.xi();
    std::vector<double> breaks{center - xi, center, center + xi, 0.0};
    auto fam = family;
    auto k = center;
    if (!flux.is_zero()) {
      zeta_ = TabulatedPrimitive([fam, k, flux](double r) { return fam.beta_prime(r - k) * derivative(flux, r); },
                                 center, lo, hi, intervals, breaks, cfg);
    }
    if (!diffusion.is_zero()) {
      nu_ = TabulatedPrimitive(
          [fam, k, diffusion](double r) { return fam.beta_prime(r - k) * derivative(diffusion, r); }, center, lo,
          hi, intervals, breaks, cfg);
      kirchhoff_ = TabulatedPrimitive([diffusion](double r) { return sqrt_diffusion_slope(diffusion, r); }, 0.0,
                                      lo, hi, intervals, {0.0}, cfg);
    }
  }

  const BetaFamily& family() const { return family_; }
  double center() const { return center_; }

  double beta(double u) const { return family_.beta(u - center_); }
  double beta_prime(double u) const { return family_.beta_prime(u - center_); }
  double beta_double_prime(double u) const { return family_.beta_double_prime(u - center_); }
  double zeta(double u) const { return zeta_(u); }
  double nu(double u) const { return nu_(u); }
  double kirchhoff(double u) const { return kirchhoff_(u); }

 private:
  BetaFamily family_;
  double center_;
  TabulatedPrimitive zeta_, nu_, kirchhoff_;
};

}  // namespace levyvisc
