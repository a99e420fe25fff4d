#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace levyvisc {

/// Discrete total variation sum_j |u_{j+1} - u_j| with periodic wrap.
inline double total_variation(std::span<const double> u) {
  double tv = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) tv += std::abs(u[(j + 1) % u.size()] - u[j]);
  return tv;
}

/// sum_j |u_j - v_j| phi_j dx.
inline double weighted_l1_distance(std::span<const double> u, std::span<const double> v, std::span<const double> phi,
                                   double dx) {
  if (u.size() != v.size() || u.size() != phi.size()) {
    throw std::invalid_argument("weighted_l1_distance: length mismatch");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += std::abs(u[j] - v[j]) * phi[j];
  return s * dx;
}

inline double l1_norm(std::span<const double> u, double dx) {
  double s = 0.0;
  for (double v : u) s += std::abs(v);
  return s * dx;
}

/// Default weight Phi(x) = exp(-|x - center|) sampled at cell centres.
inline std::vector<double> exponential_weight(std::size_t cells, double dx, double center) {
  std::vector<double> phi(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    const double x = (static_cast<double>(j) + 0.5) * dx;
    phi[j] = std::clamp(std::exp(-std::abs(x - center)), 0.0, 1.0);
  }
  return phi;
}

struct IndexWindow {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
};

inline std::size_t periodic_index(std::size_t n, long j) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((j % m) + m) % m);
}

/// max over grid shifts |k| dx <= delta of sum_{j in window} |u_{j+k} - u_j| dx.
/// Only grid-aligned shifts are visited, so the value is a lower estimate of
/// the continuous modulus with O(dx) bias.
inline double shift_modulus(std::span<const double> u, double delta, IndexWindow window, double dx) {
  if (!(delta >= dx * (1.0 - 1e-12))) throw std::invalid_argument("shift_modulus: delta must be at least dx");
  if (window.end > u.size() || window.begin > window.end) throw std::invalid_argument("shift_modulus: bad window");
  const auto kmax = static_cast<long>(std::floor(delta / dx + 1e-9));
  const std::size_t n = u.size();
  double best = 0.0;
  for (long k = -kmax; k <= kmax; ++k) {
    if (k == 0) continue;
    double s = 0.0;
    for (std::size_t j = window.begin; j < window.end; ++j) {
      s += std::abs(u[periodic_index(n, static_cast<long>(j) + k)] - u[j]);
    }
    best = std::max(best, s * dx);
  }
  return best;
}

/// Discrete J_delta on offsets -K..K (K = floor(delta / dx)), built from a
/// profile J supported in [-1, 1] and normalised to sum w_k dx = 1.
inline std::vector<double> mollifier_weights(const std::function<double(double)>& profile, double delta, double dx) {
  if (!(delta >= dx)) throw std::invalid_argument("mollifier_weights: delta must be at least dx");
  const auto K = static_cast<long>(std::floor(delta / dx + 1e-9));
  std::vector<double> w(static_cast<std::size_t>(2 * K + 1));
  double mass = 0.0;
  for (long k = -K; k <= K; ++k) {
    const double v = std::max(0.0, profile(static_cast<double>(k) * dx / delta));
    w[static_cast<std::size_t>(k + K)] = v;
    mass += v * dx;
  }
  if (!(mass > 0.0)) throw std::invalid_argument("mollifier_weights: kernel has no mass on the grid");
  for (auto& v : w) v /= mass;
  return w;
}

inline double triangular_kernel(double s) { return std::max(0.0, 1.0 - std::abs(s)); }

/// sum_j sum_k |h_{j+k} - h_{j-k}| J_delta(k dx) zeta_j dx dx, with kernel
/// weights on offsets -K..K.
inline double mollified_modulus(std::span<const double> h, std::span<const double> kernel,
                                std::span<const double> zeta, double dx) {
  if (kernel.size() % 2 != 1) throw std::invalid_argument("mollified_modulus: kernel needs odd length");
  if (zeta.size() != h.size()) throw std::invalid_argument("mollified_modulus: cutoff length mismatch");
  double mass = 0.0;
  for (double w : kernel) mass += w * dx;
  if (std::abs(mass - 1.0) > 1e-6) throw std::invalid_argument("mollified_modulus: kernel mass must be 1");
  const long K = static_cast<long>(kernel.size() / 2);
  for (long k = 1; k <= K; ++k) {
    if (std::abs(kernel[static_cast<std::size_t>(K + k)] - kernel[static_cast<std::size_t>(K - k)]) > 1e-12) {
      throw std::invalid_argument("mollified_modulus: kernel must be symmetric");
    }
  }
  const std::size_t n = h.size();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (zeta[j] == 0.0) continue;
    double inner = 0.0;
    for (long k = -K; k <= K; ++k) {
      const double w = kernel[static_cast<std::size_t>(k + K)];
      if (w == 0.0 || k == 0) continue;
      inner += std::abs(h[periodic_index(n, static_cast<long>(j) + k)] - h[periodic_index(n, static_cast<long>(j) - k)]) * w;
    }
    s += inner * zeta[j];
  }
  return s * dx * dx;
}

/// sum_j |h_{j+k} - h_{j-k}| zeta_j dx for the grid offset k.
inline double symmetric_difference(std::span<const double> h, long k, std::span<const double> zeta, double dx) {
  const std::size_t n = h.size();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    s += std::abs(h[periodic_index(n, static_cast<long>(j) + k)] - h[periodic_index(n, static_cast<long>(j) - k)]) *
         zeta[j];
  }
  return s * dx;
}

}  // namespace levyvisc
