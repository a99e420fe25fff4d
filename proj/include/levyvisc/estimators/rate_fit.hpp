#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace levyvisc {

struct RateFit {
  std::string name;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;
};

/// Least squares fit of log(value) = intercept + slope * log(abscissa).
inline RateFit fit_rate(const std::vector<std::pair<double, double>>& points, std::string name = "rate") {
  if (points.size() < 3) throw std::invalid_argument("fit_rate: need at least three points");
  for (const auto& [a, v] : points) {
    if (!(a > 0.0) || !(v > 0.0)) throw std::invalid_argument("fit_rate: entries must be positive");
  }
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [a, v] : points) {
    sx += std::log(a);
    sy += std::log(v);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [a, v] : points) {
    const double dx = std::log(a) - mx, dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: abscissae must not all coincide");
  RateFit fit;
  fit.name = std::move(name);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (const auto& [a, v] : points) {
    const double r = std::log(v) - (fit.intercept + fit.slope * std::log(a));
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.points = points;
  return fit;
}

}  // namespace levyvisc
