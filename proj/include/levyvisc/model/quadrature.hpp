#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace levyvisc {

struct QuadratureConfig {
  // Composite 4-point Gauss-Legendre panels per unit length.
  int panels_per_unit = 256;
};

namespace detail {
inline constexpr std::array<double, 4> kGaussNodes = {
    -0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
}  // namespace detail

/// Signed integral over [a, b]; b < a returns the negated integral.
template <class F>
double integrate(F&& fn, double a, double b, const QuadratureConfig& cfg = {}) {
  if (cfg.panels_per_unit <= 0) {
    throw std::invalid_argument("quadrature: panels_per_unit must be positive");
  }
  if (a == b) return 0.0;
  const double len = b - a;
  const auto panels = std::max<long>(1, static_cast<long>(std::ceil(std::abs(len) * cfg.panels_per_unit)));
  const double h = len / static_cast<double>(panels);
  double sum = 0.0;
  for (long p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * h;
    double panel = 0.0;
    for (std::size_t q = 0; q < 4; ++q) {
      panel += detail::kGaussWeights[q] * fn(mid + 0.5 * h * detail::kGaussNodes[q]);
    }
    sum += panel;
  }
  return 0.5 * h * sum;
}

/// Same as integrate() but the interval is split at every breakpoint strictly
/// inside it, so each piece sees a smooth integrand.
template <class F>
double integrate_piecewise(F&& fn, double a, double b, std::initializer_list<double> breaks,
                           const QuadratureConfig& cfg = {}) {
  if (a == b) return 0.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  std::vector<double> pts{lo};
  for (double p : breaks) {
    if (p > lo && p < hi) pts.push_back(p);
  }
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    sum += integrate(fn, pts[i], pts[i + 1], cfg);
  }
  return a < b ? sum : -sum;
}

}  // namespace levyvisc
