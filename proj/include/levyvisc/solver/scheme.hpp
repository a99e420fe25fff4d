#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "levyvisc/model/coefficient.hpp"
#include "levyvisc/model/problem.hpp"
#include "levyvisc/noise/levy_measure.hpp"
#include "levyvisc/noise/noise_path.hpp"

namespace levyvisc {

/// Uniform periodic grid on [0, domain_length).
struct Grid {
  std::size_t cells = 0;
  double domain_length = 0.0;

  Grid() = default;
  Grid(std::size_t n, double length) : cells(n), domain_length(length) {
    if (n == 0 || !(length > 0.0)) throw std::invalid_argument("Grid: cells and length must be positive");
  }
  static Grid of(const ProblemSpec& spec) { return Grid(spec.cells(), spec.domain_length); }

  double dx() const { return domain_length / static_cast<double>(cells); }
  double x(std::size_t j) const { return (static_cast<double>(j) + 0.5) * dx(); }
};

struct State {
  double t = 0.0;
  std::vector<double> values;
};

class PathBlowUp : public std::runtime_error {
 public:
  explicit PathBlowUp(std::size_t step)
      : std::runtime_error("path blow-up at step " + std::to_string(step)), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Largest explicit step for the split scheme: the advective bound dx / Lip(f)
/// and the parabolic bound dx^2 / (2 (Lip(A) + eps)), scaled by `safety`.
/// safety <= 0.5 keeps the combined deterministic update monotone.
inline double stable_dt(const ProblemSpec& spec, const Grid& grid, double epsilon, double safety) {
  if (!(safety > 0.0) || safety > 1.0) throw std::invalid_argument("stable_dt: safety must lie in (0, 1]");
  if (epsilon < 0.0) throw std::invalid_argument("stable_dt: epsilon must be nonnegative");
  constexpr double tiny = 1e-300;
  const double dx = grid.dx();
  const double adv = dx / std::max(spec.flux.lipschitz, tiny);
  const double par = dx * dx / (2.0 * (spec.diffusion.lipschitz + epsilon) + tiny);
  return safety * std::min(adv, par);
}

/// Local Lax-Friedrichs flux for the conservative flux g = -f (the equation
/// reads d_t u = +d_x f(u)).
inline double numerical_flux(const CoefficientFn& f, double u_left, double u_right, double alpha) {
  return -0.5 * (f(u_left) + f(u_right)) - 0.5 * alpha * (u_right - u_left);
}

/// Reusable buffers for step().
struct StepWorkspace {
  std::vector<double> flux_vals, diff_vals, update;
};

namespace detail {
inline void deterministic_update(std::vector<double>& u, const ProblemSpec& spec, const Grid& grid, double epsilon,
                                 double dt, StepWorkspace& ws) {
  const std::size_t n = u.size();
  const double dx = grid.dx();
  const double alpha = spec.flux.lipschitz;
  const bool has_flux = !spec.flux.is_zero();
  const bool has_diff = !spec.diffusion.is_zero() || epsilon != 0.0;
  if (!has_flux && !has_diff) return;
  ws.flux_vals.resize(n);
  ws.diff_vals.resize(n);
  ws.update.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    ws.flux_vals[j] = has_flux ? spec.flux(u[j]) : 0.0;
    ws.diff_vals[j] = spec.diffusion.is_zero() ? epsilon * u[j] : spec.diffusion(u[j]) + epsilon * u[j];
  }
  // F_{j+1/2} = -(f_j + f_{j+1}) / 2 - alpha/2 (u_{j+1} - u_j)
  auto face = [&](std::size_t l, std::size_t r) {
    return -0.5 * (ws.flux_vals[l] + ws.flux_vals[r]) - 0.5 * alpha * (u[r] - u[l]);
  };
  const double inv_dx = 1.0 / dx;
  const double inv_dx2 = inv_dx * inv_dx;
  double left_face = has_flux ? face(n - 1, 0) : 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jp = (j + 1 == n) ? 0 : j + 1;
    const std::size_t jm = (j == 0) ? n - 1 : j - 1;
    const double right_face = has_flux ? face(j, jp) : 0.0;
    const double adv = has_flux ? -(right_face - left_face) * inv_dx : 0.0;
    const double par = has_diff ? (ws.diff_vals[jp] - 2.0 * ws.diff_vals[j] + ws.diff_vals[jm]) * inv_dx2 : 0.0;
    ws.update[j] = dt * (adv + par);
    left_face = right_face;
  }
  for (std::size_t j = 0; j < n; ++j) u[j] += ws.update[j];
}
}  // namespace detail

/// One split step of the viscous equation with A_eps = A + eps id, applied in
/// the fixed order: deterministic finite-volume update, Brownian kick,
/// compensator drift, then each jump of the step in time order. Every stage
/// evaluates its coefficient at the value it receives (explicit, Ito).
inline void step_in_place(State& state, const ProblemSpec& spec, const Grid& grid, double epsilon, double dt,
                          double dW, std::span<const Jump> jumps, StepWorkspace& ws) {
  auto& u = state.values;
  detail::deterministic_update(u, spec, grid, epsilon, dt, ws);
  const std::size_t n = u.size();
  if (!spec.sigma.is_zero() && dW != 0.0) {
    for (std::size_t j = 0; j < n; ++j) u[j] += spec.sigma(grid.x(j), u[j]) * dW;
  }
  if (!spec.eta.is_zero() && !spec.measure.empty()) {
    for (std::size_t j = 0; j < n; ++j) u[j] -= dt * compensator_integral(spec.eta, spec.measure, grid.x(j), u[j]);
    for (const auto& jump : jumps) {
      for (std::size_t j = 0; j < n; ++j) u[j] += spec.eta(grid.x(j), u[j], jump.z);
    }
  }
  state.t += dt;
}

inline State step(const State& state, const ProblemSpec& spec, const Grid& grid, double epsilon, double dt, double dW,
                  std::span<const Jump> jumps) {
  State next = state;
  StepWorkspace ws;
  step_in_place(next, spec, grid, epsilon, dt, dW, jumps, ws);
  for (double v : next.values) {
    if (!std::isfinite(v)) throw PathBlowUp(0);
  }
  return next;
}

}  // namespace levyvisc
