#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "levyvisc/model/coefficient.hpp"
#include "levyvisc/noise/levy_measure.hpp"

namespace levyvisc {

/// Symmetric log-spaced sample set: `per_sign` points with |u| in [lo, hi]
/// on each side of zero. The suprema below are taken over this set and are
/// therefore lower estimates of the true suprema over u != 0.
inline std::vector<double> log_sample_grid(std::size_t per_sign = 512, double lo = 1e-4, double hi = 1e2) {
  if (per_sign < 2 || !(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_sample_grid: bad range");
  std::vector<double> out;
  out.reserve(2 * per_sign);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < per_sign; ++i) {
    const double u = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(per_sign - 1));
    out.push_back(-u);
    out.push_back(u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {
inline void require_nonzero_grid(std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("functional: empty sample grid");
  for (double u : grid) {
    if (u == 0.0) throw std::invalid_argument("functional: sample grid must exclude 0");
  }
}
}  // namespace detail

/// E(sigma, sigma~) = sup_u |sigma(u) - sigma~(u)| / |u| over the grid.
inline double functional_E(const CoefficientFn& sigma, const CoefficientFn& sigma_tilde,
                           std::span<const double> grid) {
  detail::require_nonzero_grid(grid);
  double best = 0.0;
  for (double u : grid) best = std::max(best, std::abs(sigma(u) - sigma_tilde(u)) / std::abs(u));
  return best;
}

/// D(eta, eta~) = sup_u int |eta(u;z) - eta~(u;z)|^2 / |u|^2 m(dz), atom sum.
inline double functional_D(const JumpCoefficient& eta, const JumpCoefficient& eta_tilde, const LevyMeasure& m,
                           std::span<const double> grid) {
  detail::require_nonzero_grid(grid);
  double best = 0.0;
  for (double u : grid) {
    double s = 0.0;
    for (const auto& a : m.atoms()) {
      const double d = eta(u, a.z) - eta_tilde(u, a.z);
      s += d * d * a.weight;
    }
    best = std::max(best, s / (u * u));
  }
  return best;
}

/// sup |c1'(u) - c2'(u)| on a uniform grid over [lo, hi].
inline double sup_derivative_gap(const CoefficientFn& c1, const CoefficientFn& c2, double lo, double hi,
                                 std::size_t points = 1001) {
  if (points < 2 || !(hi > lo)) throw std::invalid_argument("sup_derivative_gap: bad range");
  double best = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double u = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    best = std::max(best, std::abs(derivative(c1, u) - derivative(c2, u)));
  }
  return best;
}

}  // namespace levyvisc
