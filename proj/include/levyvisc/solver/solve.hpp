#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "levyvisc/solver/scheme.hpp"

namespace levyvisc {

struct StepDiagnostics {
  double t;
  double max_abs;
  double l2_squared;  // sum u_j^2 dx
  double tv;
};

struct Trajectory {
  std::vector<State> snapshots;
  std::vector<StepDiagnostics> diagnostics;  // entry 0 is the initial state

  const State& final_state() const { return snapshots.back(); }
};

struct SolveOptions {
  bool record_diagnostics = true;
  double blowup_factor = 1e6;
};

inline StepDiagnostics diagnose(const State& s, double dx) {
  StepDiagnostics d{s.t, 0.0, 0.0, 0.0};
  const auto& u = s.values;
  for (std::size_t j = 0; j < u.size(); ++j) {
    d.max_abs = std::max(d.max_abs, std::abs(u[j]));
    d.l2_squared += u[j] * u[j] * dx;
    d.tv += std::abs(u[(j + 1) % u.size()] - u[j]);
  }
  return d;
}

namespace detail {

inline std::vector<std::size_t> snapshot_steps(std::span<const double> output_times, const NoisePath& noise) {
  std::vector<std::size_t> steps;
  for (double t : output_times) {
    if (t < 0.0 || t > noise.horizon() * (1.0 + 1e-12)) {
      throw std::invalid_argument("solve: output time outside [0, T]");
    }
    steps.push_back(static_cast<std::size_t>(std::llround(t / noise.dt)));
  }
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  return steps;
}

inline void check_dt(const ProblemSpec& spec, const Grid& grid, double epsilon, const NoisePath& noise) {
  if (spec.cells() != grid.cells) throw std::invalid_argument("solve: initial data does not match the grid");
  if (noise.n_steps() == 0) throw std::invalid_argument("solve: empty noise path");
  if (noise.dt > stable_dt(spec, grid, epsilon, 1.0) * (1.0 + 1e-9)) {
    throw std::invalid_argument("solve: noise time step exceeds the stability limit");
  }
}

class BlowUpGuard {
 public:
  BlowUpGuard(const std::vector<double>& u0, double factor) {
    double m = 0.0;
    for (double v : u0) m = std::max(m, std::abs(v));
    limit_ = m > 0.0 ? factor * m : std::numeric_limits<double>::infinity();
  }
  void check(const std::vector<double>& u, std::size_t step) const {
    for (double v : u) {
      if (!std::isfinite(v) || std::abs(v) > limit_) throw PathBlowUp(step);
    }
  }

 private:
  double limit_;
};

}  // namespace detail

/// Integrates one equation over the noise path, one scheme step per noise
/// increment; jumps are applied at the end of the step that contains them.
/// Output times are snapped to the nearest step boundary.
inline Trajectory solve_path(const ProblemSpec& spec, const Grid& grid, double epsilon, const NoisePath& noise,
                             std::span<const double> output_times, const SolveOptions& opts = {}) {
  detail::check_dt(spec, grid, epsilon, noise);
  const auto snaps = detail::snapshot_steps(output_times, noise);
  const detail::BlowUpGuard guard(spec.u0, opts.blowup_factor);
  Trajectory traj;
  State state{0.0, spec.u0};
  StepWorkspace ws;
  std::size_t next_snap = 0;
  auto record = [&](std::size_t n) {
    if (next_snap < snaps.size() && snaps[next_snap] == n) {
      traj.snapshots.push_back(state);
      ++next_snap;
    }
    if (opts.record_diagnostics) traj.diagnostics.push_back(diagnose(state, grid.dx()));
  };
  record(0);
  for (std::size_t n = 0; n < noise.n_steps(); ++n) {
    step_in_place(state, spec, grid, epsilon, noise.dt, noise.brownian_increments[n], noise.jumps_in_step(n), ws);
    state.t = noise.dt * static_cast<double>(n + 1);
    guard.check(state.values, n);
    record(n + 1);
  }
  return traj;
}

/// Two equations advanced in lockstep on one noise realization.
inline std::pair<Trajectory, Trajectory> solve_coupled(const ProblemSpec& spec_a, const ProblemSpec& spec_b,
                                                       const Grid& grid, double eps_a, double eps_b,
                                                       const NoisePath& noise, std::span<const double> output_times,
                                                       const SolveOptions& opts = {}) {
  if (!(spec_a.measure == spec_b.measure)) {
    throw std::invalid_argument("solve_coupled: both problems must share the Levy measure");
  }
  detail::check_dt(spec_a, grid, eps_a, noise);
  detail::check_dt(spec_b, grid, eps_b, noise);
  const auto snaps = detail::snapshot_steps(output_times, noise);
  const detail::BlowUpGuard guard_a(spec_a.u0, opts.blowup_factor);
  const detail::BlowUpGuard guard_b(spec_b.u0, opts.blowup_factor);
  std::pair<Trajectory, Trajectory> out;
  State a{0.0, spec_a.u0}, b{0.0, spec_b.u0};
  StepWorkspace ws_a, ws_b;
  std::size_t next_snap = 0;
  auto record = [&](std::size_t n) {
    if (next_snap < snaps.size() && snaps[next_snap] == n) {
      out.first.snapshots.push_back(a);
      out.second.snapshots.push_back(b);
      ++next_snap;
    }
    if (opts.record_diagnostics) {
      out.first.diagnostics.push_back(diagnose(a, grid.dx()));
      out.second.diagnostics.push_back(diagnose(b, grid.dx()));
    }
  };
  record(0);
  for (std::size_t n = 0; n < noise.n_steps(); ++n) {
    const double dW = noise.brownian_increments[n];
    const auto jumps = noise.jumps_in_step(n);
    step_in_place(a, spec_a, grid, eps_a, noise.dt, dW, jumps, ws_a);
    step_in_place(b, spec_b, grid, eps_b, noise.dt, dW, jumps, ws_b);
    a.t = b.t = noise.dt * static_cast<double>(n + 1);
    guard_a.check(a.values, n);
    guard_b.check(b.values, n);
    record(n + 1);
  }
  return out;
}

/// Uniform output schedule t_i = i T / count, i = 0..count.
inline std::vector<double> uniform_schedule(double horizon, std::size_t count) {
  std::vector<double> out;
  for (std::size_t i = 0; i <= count; ++i) out.push_back(horizon * static_cast<double>(i) / static_cast<double>(count));
  return out;
}

}  // namespace levyvisc
