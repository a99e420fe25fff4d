#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "levyvisc/model/entropy.hpp"
#include "levyvisc/model/problem.hpp"
#include "levyvisc/solver/solve.hpp"

namespace levyvisc {

/// Nonnegative space-time weight psi(t, x) with analytic derivatives and a
/// compact spatial support [support_lo, support_hi].
struct TestFunction {
  std::function<double(double, double)> value, d_t, d_x, d_xx;
  double support_lo = 0.0;
  double support_hi = 0.0;
};

/// psi(t, x) = (1 - t/T)^2 cos^4(pi (x - c) / (2 r)) on |x - c| < r, zero
/// elsewhere; C^2 in x and vanishing at t = T.
inline TestFunction bump_test_function(double center, double radius, double horizon) {
  if (!(radius > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("bump_test_function: bad parameters");
  const double k = std::numbers::pi / (2.0 * radius);
  auto theta = [horizon](double t) { return std::pow(std::max(0.0, 1.0 - t / horizon), 2); };
  auto theta_t = [horizon](double t) { return -2.0 * std::max(0.0, 1.0 - t / horizon) / horizon; };
  auto inside = [center, radius](double x) { return std::abs(x - center) < radius; };
  TestFunction psi;
  psi.support_lo = center - radius;
  psi.support_hi = center + radius;
  psi.value = [=](double t, double x) {
    if (!inside(x)) return 0.0;
    const double c = std::cos(k * (x - center));
    return theta(t) * c * c * c * c;
  };
  psi.d_t = [=](double t, double x) {
    if (!inside(x)) return 0.0;
    const double c = std::cos(k * (x - center));
    return theta_t(t) * c * c * c * c;
  };
  psi.d_x = [=](double t, double x) {
    if (!inside(x)) return 0.0;
    const double s = k * (x - center);
    const double c = std::cos(s);
    return theta(t) * (-4.0 * k * c * c * c * std::sin(s));
  };
  psi.d_xx = [=](double t, double x) {
    if (!inside(x)) return 0.0;
    const double s = k * (x - center);
    const double c = std::cos(s), sn = std::sin(s);
    return theta(t) * k * k * (12.0 * c * c * sn * sn - 4.0 * c * c * c * c);
  };
  return psi;
}

/// Per-path discrete entropy residual: the left side minus the right side of
/// the entropy inequality with the dW and N~ martingale integrals removed,
///
///   int int [beta(u) psi_t + nu(u) psi_xx - psi_x zeta(u) + 1/2 sigma^2 beta''(u) psi
///            + int int_0^1 (1 - l) eta^2 beta''(u + l eta) psi dl m(dz)
///            - beta''(u) |d_x G(u)|^2 psi] dx dt + int beta(u0) psi(0) dx.
///
/// Time integrals use the trapezoid rule over the trajectory snapshots, which
/// must start at t = 0; d_x G(u) uses central differences.
inline double entropy_residual(const Trajectory& traj, const EntropyTriple& triple, const ProblemSpec& spec,
                               const TestFunction& psi) {
  const double L = spec.domain_length;
  const double dx = spec.dx();
  if (psi.support_lo < dx || psi.support_hi > L - dx) {
    throw std::invalid_argument("entropy_residual: test function support touches the domain boundary");
  }
  if (traj.snapshots.size() < 2 || traj.snapshots.front().t != 0.0) {
    throw std::invalid_argument("entropy_residual: need snapshots starting at t = 0");
  }
  const std::size_t n = spec.cells();
  const auto jlo = static_cast<std::size_t>(std::max(0.0, std::floor(psi.support_lo / dx) - 1.0));
  const auto jhi = std::min(n, static_cast<std::size_t>(std::ceil(psi.support_hi / dx) + 1.0));
  constexpr int kLambdaNodes = 16;
  const bool has_jumps = !spec.eta.is_zero() && !spec.measure.empty();

  std::vector<double> G(n);
  auto slice = [&](const State& s) {
    const auto& u = s.values;
    const double t = s.t;
    for (std::size_t j = 0; j < n; ++j) G[j] = triple.kirchhoff(u[j]);
    double acc = 0.0;
    for (std::size_t j = jlo; j < jhi; ++j) {
      const double x = (static_cast<double>(j) + 0.5) * dx;
      const double p = psi.value(t, x);
      const double uj = u[j];
      double term = triple.beta(uj) * psi.d_t(t, x) + triple.nu(uj) * psi.d_xx(t, x) - psi.d_x(t, x) * triple.zeta(uj);
      if (p != 0.0) {
        const double b2 = triple.beta_double_prime(uj);
        if (!spec.sigma.is_zero()) {
          const double sg = spec.sigma(x, uj);
          term += 0.5 * sg * sg * b2 * p;
        }
        if (has_jumps) {
          double jump_term = 0.0;
          for (const auto& a : spec.measure.atoms()) {
            const double e = spec.eta(x, uj, a.z);
            double lam = 0.0;
            for (int q = 0; q < kLambdaNodes; ++q) {
              const double l = (q + 0.5) / kLambdaNodes;
              lam += (1.0 - l) * triple.beta_double_prime(uj + l * e);
            }
            jump_term += a.weight * e * e * lam / kLambdaNodes;
          }
          term += jump_term * p;
        }
        const double grad = (G[(j + 1) % n] - G[(j + n - 1) % n]) / (2.0 * dx);
        term -= b2 * grad * grad * p;
      }
      acc += term;
    }
    return acc * dx;
  };

  double total = 0.0;
  double prev_t = 0.0, prev_v = 0.0;
  for (std::size_t m = 0; m < traj.snapshots.size(); ++m) {
    const auto& s = traj.snapshots[m];
    const double v = slice(s);
    if (m > 0) total += 0.5 * (s.t - prev_t) * (v + prev_v);
    prev_t = s.t;
    prev_v = v;
  }
  double initial = 0.0;
  for (std::size_t j = jlo; j < jhi; ++j) {
    const double x = (static_cast<double>(j) + 0.5) * dx;
    initial += triple.beta(spec.u0[j]) * psi.value(0.0, x);
  }
  return total + initial * dx;
}

/// Monte Carlo average of entropy_residual over a set of trajectories.
inline double entropy_residual_expectation(std::span<const Trajectory> trajectories, const EntropyTriple& triple,
                                           const ProblemSpec& spec, const TestFunction& psi) {
  if (trajectories.empty()) throw std::invalid_argument("entropy_residual_expectation: no trajectories");
  double s = 0.0;
  for (const auto& tr : trajectories) s += entropy_residual(tr, triple, spec, psi);
  return s / static_cast<double>(trajectories.size());
}

}  // namespace levyvisc
