#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "levyvisc/estimators/entropy_residual.hpp"
#include "levyvisc/estimators/grid_functionals.hpp"
#include "levyvisc/estimators/monte_carlo.hpp"
#include "levyvisc/estimators/rate_fit.hpp"
#include "levyvisc/experiments/builders.hpp"
#include "levyvisc/experiments/config.hpp"
#include "levyvisc/experiments/report.hpp"
#include "levyvisc/model/functionals.hpp"
#include "levyvisc/model/validation.hpp"
#include "levyvisc/solver/solve.hpp"

namespace levyvisc {

struct RunOptions {
  unsigned threads = 1;
  bool snapshots = false;
};

namespace driver_detail {

inline std::string tag(const char* prefix, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%g", prefix, v);
  return buf;
}

inline ProblemSpec build(const RunConfig& cfg, std::size_t cells, const json* problem = nullptr) {
  const json& p = problem ? *problem : cfg.problem;
  if (p.is_null()) throw ConfigError("config: missing 'problem' block");
  return build_problem(p, cells, cfg.domain_length);
}

inline void require_valid(const ProblemSpec& spec, bool fractional) {
  ValidationOptions opts;
  opts.fractional_regime = fractional;
  const auto rep = validate_assumptions(spec, opts);
  if (!rep.all_passed()) {
    std::string msg = "problem violates the standing hypotheses:";
    for (const auto& f : rep.failures()) msg += "\n  " + f;
    throw ConfigError(msg);
  }
}

inline void require_x_independent(const ProblemSpec& spec, const char* driver) {
  if (spec.noise_is_x_dependent()) {
    throw ConfigError(std::string(driver) + ": noise coefficients must not depend on x");
  }
}

/// Smallest power of two N with T / N inside the configured stable step.
inline std::size_t steps_needed(const ProblemSpec& spec, double epsilon, const RunConfig& cfg) {
  const double dt_max = stable_dt(spec, Grid::of(spec), epsilon, cfg.safety);
  std::size_t n = 1;
  while (cfg.horizon / static_cast<double>(n) > dt_max) {
    if (n > (std::size_t{1} << 40)) throw ConfigError("time: stable step is too small for the horizon");
    n *= 2;
  }
  return n;
}

inline NoisePath view(const NoisePath& fine, std::size_t steps) { return coarsen(fine, fine.n_steps() / steps); }

inline std::vector<double> final_only(double horizon) { return {horizon}; }

inline SolveOptions quiet() {
  SolveOptions o;
  o.record_diagnostics = false;
  return o;
}

/// Cell averages of a fine-grid profile over blocks of `factor` cells.
inline std::vector<double> restrict_average(const std::vector<double>& fine, std::size_t factor) {
  std::vector<double> out(fine.size() / factor, 0.0);
  for (std::size_t j = 0; j < fine.size(); ++j) out[j / factor] += fine[j];
  for (auto& v : out) v /= static_cast<double>(factor);
  return out;
}

inline bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

inline bool nondecreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) return false;
  }
  return true;
}

inline bool all_positive(const std::vector<std::pair<double, double>>& pts) {
  return std::all_of(pts.begin(), pts.end(), [](const auto& p) { return p.second > 0.0; });
}

inline std::string fmt(double v) { return format_number(v); }

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace driver_detail

/// Grid checks of the configured problem, one verdict per hypothesis.
inline Report run_validate(const RunConfig& cfg) {
  driver_detail::Stopwatch clock;
  Report r;
  r.experiment = "validate";
  r.config = cfg.raw;
  const auto spec = driver_detail::build(cfg, cfg.cells);
  ValidationOptions opts;
  opts.fractional_regime = cfg.experiment.driver == "fracbv";
  for (const auto& c : validate_assumptions(spec, opts).checks) {
    r.verdict(c.id, c.passed, c.detail);
    if (c.value) r.values.push_back({c.id, *c.value});
  }
  r.wall_seconds = clock.seconds();
  return r;
}

/// E[TV(u_eps(T))] against TV(u0) for every eps, with the L^2 moment and L^1
/// monitors on the same paths.
inline Report run_bv(const RunConfig& cfg, const RunOptions& opts = {}) {
  using namespace driver_detail;
  Stopwatch clock;
  const auto& eps = cfg.experiment.epsilons;
  if (eps.empty()) throw ConfigError("experiment.epsilons: empty sweep");
  const auto spec = build(cfg, cfg.cells);
  require_x_independent(spec, "bv");
  require_valid(spec, false);

  const Grid grid = Grid::of(spec);
  std::size_t steps = 1;
  for (double e : eps) steps = std::max(steps, steps_needed(spec, e, cfg));
  const double dt = cfg.horizon / static_cast<double>(steps);
  const auto schedule = uniform_schedule(cfg.horizon, cfg.outputs);
  const std::size_t n_times = schedule.size();

  // per eps: TV(T), L1(T), then |u(t_i)|_2^2 for every output time
  const std::size_t stride = 2 + n_times;
  std::vector<std::string> names;
  for (double e : eps) {
    names.push_back(tag("tv@eps", e));
    names.push_back(tag("l1@eps", e));
    for (std::size_t i = 0; i < n_times; ++i) names.push_back(tag("l2sq@eps", e) + tag("@t", schedule[i]));
  }
  std::vector<SnapshotDump> dumps(eps.size());
  auto per_path = [&](const PathContext& ctx) {
    const auto noise = make_noise_path(ctx.base_seed, ctx.path_index, dt, steps, spec.measure);
    std::vector<double> out;
    out.reserve(names.size());
    for (std::size_t k = 0; k < eps.size(); ++k) {
      const auto traj = solve_path(spec, grid, eps[k], noise, schedule, quiet());
      const auto& u = traj.final_state().values;
      out.push_back(total_variation(u));
      out.push_back(l1_norm(u, grid.dx()));
      for (const auto& s : traj.snapshots) out.push_back(diagnose(s, grid.dx()).l2_squared);
      if (ctx.path_index == 0) dumps[k] = {tag("path0_eps", eps[k]), grid.dx(), u};
    }
    return out;
  };
  const auto all = monte_carlo(per_path, names, cfg.n_paths, cfg.base_seed, opts.threads);

  Report r;
  r.experiment = "bv";
  r.config = cfg.raw;
  const double tv0 = total_variation(spec.u0);
  const double l10 = l1_norm(spec.u0, grid.dx());
  double l2_0 = 0.0;
  for (double v : spec.u0) l2_0 += v * v * grid.dx();
  r.values.push_back({"tv0", tv0});
  r.values.push_back({"l1_0", l10});
  r.values.push_back({"l2sq_0", l2_0});
  r.values.push_back({"dt", dt});

  const double tol_bv = cfg.experiment.threshold("tol_bv", 0.05);
  const double tol_l1 = cfg.experiment.threshold("tol_l1", 0.1);
  const double moment_factor = cfg.experiment.threshold("moment_factor", 2.0);
  bool bv_ok = true, l1_ok = true, moment_ok = true;
  std::string bv_detail, l1_detail, moment_detail;
  double baseline = 0.0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const auto& tv = all[k * stride];
    const auto& l1 = all[k * stride + 1];
    r.estimates.push_back(tv);
    r.estimates.push_back(l1);
    double sup_l2 = 0.0;
    for (std::size_t i = 0; i < n_times; ++i) sup_l2 = std::max(sup_l2, all[k * stride + 2 + i].mean);
    r.values.push_back({tag("sup_t_l2sq@eps", eps[k]), sup_l2});
    if (k == 0) baseline = sup_l2;

    if (!(tv.mean <= tv0 * (1.0 + tol_bv))) bv_ok = false;
    bv_detail += tag("eps", eps[k]) + ": E[TV]=" + fmt(tv.mean) + " +- " + fmt(tv.half_width_95) + "; ";
    if (!(l1.mean <= l10 * (1.0 + tol_l1))) l1_ok = false;
    l1_detail += tag("eps", eps[k]) + ": E|u|_1=" + fmt(l1.mean) + "; ";
    const double ratio = baseline > 0.0 ? sup_l2 / baseline : (sup_l2 == 0.0 ? 1.0 : 0.0);
    if (!(ratio <= moment_factor && ratio >= 1.0 / moment_factor)) moment_ok = false;
    moment_detail += tag("eps", eps[k]) + ": ratio " + fmt(ratio) + "; ";
  }
  r.verdict("bv_bound", bv_ok, "TV(u0)=" + fmt(tv0) + "; " + bv_detail);
  r.verdict("moment_monitor", moment_ok, moment_detail);
  r.verdict("l1_monitor", l1_ok, "|u0|_1=" + fmt(l10) + "; " + l1_detail);
  r.snapshots = std::move(dumps);
  r.wall_seconds = clock.seconds();
  return r;
}

/// E|u_eps(T) - u_ref(T)|_1 over an eps sweep on common noise; the reference
/// runs on a grid refined by `reference.refine` with eps_ref = factor min(eps).
inline Report run_viscosity_rate(const RunConfig& cfg, const RunOptions& opts = {}) {
  using namespace driver_detail;
  Stopwatch clock;
  auto eps = cfg.experiment.epsilons;
  if (eps.size() < 4) throw ConfigError("experiment.epsilons: the rate sweep needs at least four values");
  std::sort(eps.begin(), eps.end(), std::greater<>());
  const double eps_min = eps.back();
  if (!(eps_min > 0.0)) throw ConfigError("experiment.epsilons: values must be positive");
  const std::size_t refine = cfg.experiment.reference_refine;
  const double eps_ref = cfg.experiment.reference_epsilon_factor * eps_min;
  if (!(eps_ref >= 0.0) || eps_ref >= eps_min) {
    throw ConfigError("experiment.reference: reference viscosity must lie below the finest sweep member");
  }
  const auto spec = build(cfg, cfg.cells);
  const auto ref_spec = build(cfg, cfg.cells * refine);
  require_x_independent(spec, "rate");
  require_valid(spec, false);

  const Grid grid = Grid::of(spec), ref_grid = Grid::of(ref_spec);
  std::size_t sweep_steps = 1;
  for (double e : eps) sweep_steps = std::max(sweep_steps, steps_needed(spec, e, cfg));
  const std::size_t ref_steps = steps_needed(ref_spec, eps_ref, cfg);
  const std::size_t steps = std::max(sweep_steps, ref_steps);
  const double dt = cfg.horizon / static_cast<double>(steps);
  const auto at_T = final_only(cfg.horizon);

  std::vector<std::string> names;
  for (double e : eps) names.push_back(tag("err@eps", e));
  std::vector<SnapshotDump> dumps;
  auto per_path = [&](const PathContext& ctx) {
    const auto noise = make_noise_path(ctx.base_seed, ctx.path_index, dt, steps, spec.measure);
    const auto ref = solve_path(ref_spec, ref_grid, eps_ref, view(noise, ref_steps), at_T, quiet());
    const auto ref_coarse = restrict_average(ref.final_state().values, refine);
    const auto sweep_noise = view(noise, sweep_steps);
    std::vector<double> out;
    for (double e : eps) {
      const auto traj = solve_path(spec, grid, e, sweep_noise, at_T, quiet());
      std::vector<double> diff(ref_coarse.size());
      for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = traj.final_state().values[j] - ref_coarse[j];
      out.push_back(l1_norm(diff, grid.dx()));
      if (ctx.path_index == 0) dumps.push_back({tag("path0_eps", e), grid.dx(), traj.final_state().values});
    }
    if (ctx.path_index == 0) dumps.push_back({"path0_reference", ref_grid.dx(), ref.final_state().values});
    return out;
  };
  const auto est = monte_carlo(per_path, names, cfg.n_paths, cfg.base_seed, opts.threads);

  Report r;
  r.experiment = "rate";
  r.config = cfg.raw;
  r.estimates = est;
  r.values.push_back({"eps_ref", eps_ref});
  r.values.push_back({"reference_cells", static_cast<double>(ref_grid.cells)});
  r.values.push_back({"dt_sweep", cfg.horizon / static_cast<double>(sweep_steps)});
  r.values.push_back({"dt_reference", cfg.horizon / static_cast<double>(ref_steps)});

  std::vector<std::pair<double, double>> pts;
  std::vector<double> errs;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    pts.emplace_back(eps[k], est[k].mean);
    errs.push_back(est[k].mean);
  }
  const double hi = *std::max_element(errs.begin(), errs.end());
  const double lo = *std::min_element(errs.begin(), errs.end());
  if (hi == 0.0 || (hi - lo) <= 1e-9 * hi) {
    r.verdicts.push_back({"viscosity_rate", VerdictStatus::Degenerate,
                          "degenerate sweep: error does not vary with eps (" + fmt(hi) + ")"});
  } else {
    const bool decreasing = strictly_decreasing(errs);
    r.verdict("errors_decreasing", decreasing, decreasing ? "strictly decreasing in eps" : "not monotone in eps");
    if (all_positive(pts)) {
      auto fit = fit_rate(pts, "error_vs_eps");
      const double smin = cfg.experiment.threshold("slope_min", 0.4);
      const double smax = cfg.experiment.threshold("slope_max", 1.2);
      r.verdict("viscosity_rate", fit.slope >= smin && fit.slope <= smax,
                "slope " + fmt(fit.slope) + " in [" + fmt(smin) + ", " + fmt(smax) + "], r2 " + fmt(fit.r_squared));
      r.rates.push_back(std::move(fit));
    } else {
      r.verdict("viscosity_rate", false, "zero error at some sweep point; slope undefined");
    }
  }
  r.snapshots = std::move(dumps);
  r.wall_seconds = clock.seconds();
  return r;
}

/// Coupled base/perturbed runs for one perturbation channel over a sweep of
/// sizes h: E int |u - v| Phi dx at T, the matching coefficient functional,
/// and the fitted order in h.
inline Report run_continuous_dependence(const RunConfig& cfg, const RunOptions& opts = {}) {
  using namespace driver_detail;
  Stopwatch clock;
  const auto& ex = cfg.experiment;
  const std::string channel = ex.channel;
  if (channel != "flux" && channel != "diffusion" && channel != "sigma" && channel != "eta") {
    throw ConfigError("experiment.channel: expected one of flux, diffusion, sigma, eta");
  }
  if (ex.h.empty()) throw ConfigError("experiment.h: empty sweep");
  const double eps = ex.epsilons.empty() ? 0.0 : ex.epsilons.front();
  const auto base = build(cfg, cfg.cells);
  require_x_independent(base, "cdep");
  require_valid(base, false);

  auto perturb = [&](double h) {
    if (channel == "flux") return perturb_flux(base, h);
    if (channel == "diffusion") return perturb_diffusion(base, h);
    if (channel == "sigma") return perturb_sigma(base, h);
    return perturb_eta(base, h);
  };
  std::vector<ProblemSpec> perturbed;
  for (double h : ex.h) {
    perturbed.push_back(perturb(h));
    require_valid(perturbed.back(), false);
  }
  const Grid grid = Grid::of(base);
  std::size_t steps = steps_needed(base, eps, cfg);
  for (const auto& p : perturbed) steps = std::max(steps, steps_needed(p, eps, cfg));
  const double dt = cfg.horizon / static_cast<double>(steps);
  const auto phi = exponential_weight(grid.cells, grid.dx(), ex.weight_center.value_or(0.5 * cfg.domain_length));
  const auto at_T = final_only(cfg.horizon);

  std::vector<std::string> names;
  for (double h : ex.h) names.push_back(tag("dist@h", h));
  auto per_path = [&](const PathContext& ctx) {
    const auto noise = make_noise_path(ctx.base_seed, ctx.path_index, dt, steps, base.measure);
    const auto u = solve_path(base, grid, eps, noise, at_T, quiet());
    std::vector<double> out;
    for (const auto& p : perturbed) {
      const auto v = solve_path(p, grid, eps, noise, at_T, quiet());
      out.push_back(weighted_l1_distance(u.final_state().values, v.final_state().values, phi, grid.dx()));
    }
    return out;
  };
  const auto est = monte_carlo(per_path, names, cfg.n_paths, cfg.base_seed, opts.threads);

  Report r;
  r.experiment = "cdep";
  r.config = cfg.raw;
  r.estimates = est;
  r.values.push_back({"dt", dt});

  double umax = 0.0;
  for (double v : base.u0) umax = std::max(umax, std::abs(v));
  const double range = std::max(1.0, 2.0 * umax);
  const auto log_grid = log_sample_grid();
  std::vector<std::pair<double, double>> pts;
  std::vector<double> dists;
  bool h0_ok = true, has_h0 = false;
  for (std::size_t k = 0; k < ex.h.size(); ++k) {
    const double h = ex.h[k];
    const auto& p = perturbed[k];
    double functional = 0.0;
    if (channel == "flux") functional = sup_derivative_gap(base.flux, p.flux, -range, range);
    if (channel == "diffusion") functional = sup_derivative_gap(base.diffusion, p.diffusion, -range, range);
    if (channel == "sigma") functional = functional_E(base.sigma, p.sigma, log_grid);
    if (channel == "eta") functional = functional_D(base.eta, p.eta, base.measure, log_grid);
    r.values.push_back({tag("functional@h", h), functional});
    if (h == 0.0) {
      has_h0 = true;
      if (est[k].mean != 0.0 || est[k].variance != 0.0) h0_ok = false;
    } else {
      pts.emplace_back(std::abs(h), est[k].mean);
    }
  }
  if (has_h0) r.verdict("h0_exact", h0_ok, h0_ok ? "distance is exactly zero" : "nonzero distance at h = 0");

  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& p : pts) dists.push_back(p.second);
  if (pts.size() < 3) throw ConfigError("experiment.h: need at least three nonzero sizes for the rate fit");
  const bool mono = strictly_decreasing(dists);
  r.verdict("distance_vanishing", mono, mono ? "distance decreases with h" : "distance not monotone in h");
  if (all_positive(pts)) {
    auto fit = fit_rate(pts, "distance_vs_h");
    const double smin = ex.threshold("slope_min", channel == "flux" ? 0.9 : 0.4);
    const double smax = ex.threshold("slope_max", channel == "flux" ? 1.1 : std::numeric_limits<double>::infinity());
    r.verdict("cdep_slope", fit.slope >= smin && fit.slope <= smax,
              channel + " slope " + fmt(fit.slope) + " vs [" + fmt(smin) + ", " + fmt(smax) + "]");
    r.rates.push_back(std::move(fit));
  } else {
    r.verdict("cdep_slope", false, "zero distance at a nonzero h; slope undefined");
  }
  r.wall_seconds = clock.seconds();
  return r;
}

namespace driver_detail {

struct ModulusSweep {
  std::vector<EstimateSummary> estimates;
  RateFit fit;
  bool monotone = false;
};

inline IndexWindow window_cells(const Grid& grid, std::pair<double, double> w) {
  IndexWindow out;
  const double dx = grid.dx();
  out.begin = static_cast<std::size_t>(std::max(0.0, std::ceil(w.first / dx - 0.5)));
  out.end = std::min(grid.cells, static_cast<std::size_t>(std::max(0.0, std::floor(w.second / dx - 0.5) + 1.0)));
  if (out.end <= out.begin) throw ConfigError("experiment.window: contains no cell centre");
  return out;
}

inline ModulusSweep modulus_sweep(const RunConfig& cfg, const ProblemSpec& spec, double eps,
                                  const std::vector<double>& deltas, IndexWindow window, const std::string& prefix,
                                  unsigned threads) {
  const Grid grid = Grid::of(spec);
  const std::size_t steps = steps_needed(spec, eps, cfg);
  const double dt = cfg.horizon / static_cast<double>(steps);
  std::vector<std::string> names;
  for (double d : deltas) names.push_back(prefix + tag("@delta", d));
  const auto at_T = final_only(cfg.horizon);
  auto per_path = [&](const PathContext& ctx) {
    const auto noise = make_noise_path(ctx.base_seed, ctx.path_index, dt, steps, spec.measure);
    const auto traj = solve_path(spec, grid, eps, noise, at_T, quiet());
    std::vector<double> out;
    for (double d : deltas) out.push_back(shift_modulus(traj.final_state().values, d, window, grid.dx()));
    return out;
  };
  ModulusSweep s;
  s.estimates = monte_carlo(per_path, names, cfg.n_paths, cfg.base_seed, threads);
  std::vector<std::pair<double, double>> pts;
  std::vector<double> means;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    pts.emplace_back(deltas[k], s.estimates[k].mean);
    means.push_back(s.estimates[k].mean);
  }
  s.monotone = nondecreasing(means);
  if (all_positive(pts)) s.fit = fit_rate(pts, prefix + "_vs_delta");
  s.fit.name = prefix + "_vs_delta";
  s.fit.points = pts;
  return s;
}

}  // namespace driver_detail

/// E[shift modulus of u_eps(T) on K_R] over a delta sweep, for x-dependent
/// noise; an optional x-independent control problem runs on the same sweep.
inline Report run_fractional_bv(const RunConfig& cfg, const RunOptions& opts = {}) {
  using namespace driver_detail;
  Stopwatch clock;
  const auto& ex = cfg.experiment;
  auto deltas = ex.deltas;
  if (deltas.size() < 4) throw ConfigError("experiment.deltas: need at least four values");
  std::sort(deltas.begin(), deltas.end());
  if (!ex.window) throw ConfigError("experiment.window: required for fracbv");
  const double dmax = deltas.back();
  const auto w = *ex.window;
  if (w.first - dmax <= 0.0 || w.second + dmax >= cfg.domain_length) {
    throw ConfigError("experiment.window: K_R widened by max delta touches the domain boundary");
  }
  const double eps = ex.epsilons.empty() ? 0.0 : ex.epsilons.front();
  const auto spec = build(cfg, cfg.cells);
  if (!spec.noise_is_x_dependent()) throw ConfigError("fracbv: the main problem needs x-dependent noise");
  require_valid(spec, true);
  const Grid grid = Grid::of(spec);
  if (deltas.front() < grid.dx()) throw ConfigError("experiment.deltas: every delta must be at least dx");
  const auto window = window_cells(grid, w);

  Report r;
  r.experiment = "fracbv";
  r.config = cfg.raw;
  const auto main = modulus_sweep(cfg, spec, eps, deltas, window, "modulus", opts.threads);
  r.estimates = main.estimates;
  const double smin = ex.threshold("slope_min", 0.2);
  if (all_positive(main.fit.points)) {
    r.verdict("fracbv_slope", main.fit.slope >= smin,
              "slope " + fmt(main.fit.slope) + " >= " + fmt(smin) + ", r2 " + fmt(main.fit.r_squared));
    r.rates.push_back(main.fit);
  } else {
    r.verdict("fracbv_slope", false, "zero modulus at some delta; slope undefined");
  }
  r.verdict("fracbv_monotone", main.monotone, main.monotone ? "nondecreasing in delta" : "not monotone in delta");

  if (cfg.control) {
    const auto ctrl = build(cfg, cfg.cells, &*cfg.control);
    require_x_independent(ctrl, "fracbv control");
    require_valid(ctrl, false);
    const auto c = modulus_sweep(cfg, ctrl, eps, deltas, window, "control_modulus", opts.threads);
    for (const auto& e : c.estimates) r.estimates.push_back(e);
    const double cmin = ex.threshold("control_slope_min", 0.9);
    if (all_positive(c.fit.points)) {
      r.verdict("control_slope", c.fit.slope >= cmin, "slope " + fmt(c.fit.slope) + " >= " + fmt(cmin));
      r.rates.push_back(c.fit);
    } else {
      r.verdict("control_slope", false, "zero modulus at some delta; slope undefined");
    }
  }
  r.wall_seconds = clock.seconds();
  return r;
}

/// Entropy residual in expectation for each configured (beta_xi, psi) pair.
/// The discretization allowance C dx is fitted from the spread of the
/// residual across `calibration_cells`; the finest resolution is reported.
inline Report run_entropy_residual(const RunConfig& cfg, const RunOptions& opts = {}) {
  using namespace driver_detail;
  Stopwatch clock;
  const auto& ex = cfg.experiment;
  if (ex.pairs.empty()) throw ConfigError("experiment.pairs: need at least one (xi, psi) pair");
  auto cells = ex.calibration_cells;
  if (cells.empty()) cells.push_back(cfg.cells);
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  const double eps = ex.epsilons.empty() ? 0.0 : ex.epsilons.front();

  std::vector<ProblemSpec> specs;
  for (std::size_t c : cells) specs.push_back(build(cfg, c));
  require_valid(specs.back(), false);
  const bool deterministic = specs.back().is_deterministic();

  double umax = 0.0;
  for (double v : specs.back().u0) umax = std::max(umax, std::abs(v));
  const double bound = 4.0 * umax + 1.0;
  std::vector<EntropyTriple> triples;
  std::vector<TestFunction> psis;
  for (const auto& p : ex.pairs) {
    triples.emplace_back(BetaFamily(p.xi), p.center, specs.back().flux, specs.back().diffusion, -bound, bound);
    psis.push_back(bump_test_function(p.psi_center, p.psi_radius, cfg.horizon));
  }
  std::size_t steps = 1;
  std::vector<std::size_t> own_steps;
  for (const auto& s : specs) {
    own_steps.push_back(steps_needed(s, eps, cfg));
    steps = std::max(steps, own_steps.back());
  }
  const double dt = cfg.horizon / static_cast<double>(steps);
  const auto schedule = uniform_schedule(cfg.horizon, cfg.outputs);

  std::vector<std::string> names;
  for (std::size_t c : cells) {
    for (std::size_t p = 0; p < ex.pairs.size(); ++p) {
      names.push_back("residual@pair=" + std::to_string(p) + "@cells=" + std::to_string(c));
    }
  }
  auto per_path = [&](const PathContext& ctx) {
    const auto noise = make_noise_path(ctx.base_seed, ctx.path_index, dt, steps, specs.back().measure);
    std::vector<double> out;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const auto traj = solve_path(specs[i], Grid::of(specs[i]), eps, view(noise, own_steps[i]), schedule, quiet());
      for (std::size_t p = 0; p < ex.pairs.size(); ++p) {
        out.push_back(entropy_residual(traj, triples[p], specs[i], psis[p]));
      }
    }
    return out;
  };
  // a deterministic problem needs one path; two keep the summary well defined
  const std::size_t paths = deterministic ? 2 : cfg.n_paths;
  const auto est = monte_carlo(per_path, names, paths, cfg.base_seed, opts.threads);

  Report r;
  r.experiment = "entropy";
  r.config = cfg.raw;
  r.estimates = est;
  const std::size_t np = ex.pairs.size();
  for (std::size_t p = 0; p < np; ++p) {
    double c_fit = 0.0;
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      const double d1 = specs[i].dx(), d2 = specs[i + 1].dx();
      c_fit = std::max(c_fit, std::abs(est[i * np + p].mean - est[(i + 1) * np + p].mean) / (d1 - d2));
    }
    const auto& fine = est[(cells.size() - 1) * np + p];
    const double allowance = fine.half_width_95 + c_fit * specs.back().dx();
    r.values.push_back({"allowance@pair=" + std::to_string(p), allowance});
    r.verdict("entropy_pair_" + std::to_string(p), fine.mean >= -allowance,
              "residual " + fmt(fine.mean) + " >= -" + fmt(allowance) + " (C = " + fmt(c_fit) + ")");
  }
  r.wall_seconds = clock.seconds();
  return r;
}

namespace driver_detail {

inline ProblemSpec constant_problem(double value, std::size_t cells, double length) {
  ProblemSpec s;
  s.domain_length = length;
  s.u0.assign(cells, value);
  return s;
}

}  // namespace driver_detail

/// Closed-form cross-checks of the solver: transport, heat, geometric
/// Brownian motion and the compensated jump exponential.
inline Report run_oracles(const RunConfig& cfg, const RunOptions& opts = {}) {
  using namespace driver_detail;
  Stopwatch clock;
  Report r;
  r.experiment = "oracle";
  r.config = cfg.raw;
  const double L = 1.0;

  {
    // u_t = c u_x transports u0 to u0(x + c t); one full period returns u0
    const double c = 1.0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t n : {50u, 100u, 200u, 400u}) {
      ProblemSpec s;
      s.domain_length = L;
      s.u0 = sample_cells([&](double x) { return std::sin(2.0 * std::numbers::pi * x / L); }, n, L);
      s.flux = CoefficientFn::from_u([c](double u) { return c * u; }, c, 0.0, "linear");
      const double T = L / c;
      const auto steps = static_cast<std::size_t>(std::ceil(T / stable_dt(s, Grid::of(s), 0.0, 0.5)));
      NoisePath noise;
      noise.dt = T / static_cast<double>(steps);
      noise.brownian_increments.assign(steps, 0.0);
      const auto traj = solve_path(s, Grid::of(s), 0.0, noise, final_only(T), quiet());
      std::vector<double> diff(n);
      for (std::size_t j = 0; j < n; ++j) diff[j] = traj.final_state().values[j] - s.u0[j];
      pts.emplace_back(s.dx(), l1_norm(diff, s.dx()));
    }
    auto fit = fit_rate(pts, "transport_error_vs_dx");
    const double smin = cfg.experiment.threshold("transport_slope_min", 0.9);
    r.verdict("transport_slope", fit.slope >= smin, "slope " + fmt(fit.slope) + " >= " + fmt(smin));
    r.rates.push_back(std::move(fit));
  }
  {
    ProblemSpec s;
    s.domain_length = L;
    s.u0 = sample_cells([&](double x) { return (x >= 0.25 && x < 0.5) ? 1.0 : 0.0; }, 100, L);
    s.diffusion = CoefficientFn::from_u([](double u) { return 0.5 * u; }, 0.5, 0.0, "linear");
    const std::size_t steps = 2000;
    NoisePath noise;
    noise.dt = stable_dt(s, Grid::of(s), 0.0, 0.5);
    noise.brownian_increments.assign(steps, 0.0);
    const auto traj = solve_path(s, Grid::of(s), 0.0, noise, final_only(noise.horizon()));
    bool mono = true;
    for (std::size_t i = 1; i < traj.diagnostics.size(); ++i) {
      if (traj.diagnostics[i].l2_squared > traj.diagnostics[i - 1].l2_squared) mono = false;
    }
    r.values.push_back({"heat_l2sq_final", traj.diagnostics.back().l2_squared});
    r.verdict("heat_l2_monotone", mono, mono ? "L2 norm non-increasing every step" : "L2 norm increased");
  }
  {
    // du = lambda u dW from u0 = c: u(T) = c exp(lambda W(T) - lambda^2 T / 2)
    const double c = 1.0, lambda = 0.5, T = 1.0, dt = 1e-4;
    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    auto s = constant_problem(c, 4, L);
    s.sigma = CoefficientFn::from_u([lambda](double u) { return lambda * u; }, lambda, 0.0, "linear");
    const Grid grid = Grid::of(s);
    auto per_path = [&](const PathContext& ctx) {
      const auto noise = make_noise_path(ctx.base_seed, ctx.path_index, dt, steps, s.measure);
      const auto traj = solve_path(s, grid, 0.0, noise, final_only(T), quiet());
      const double exact = c * std::exp(lambda * noise.brownian_at(steps) - 0.5 * lambda * lambda * T);
      return std::abs(traj.final_state().values[0] - exact);
    };
    auto e = monte_carlo_scalar(per_path, std::max<std::size_t>(cfg.n_paths, 2), cfg.base_seed, opts.threads,
                                "gbm_strong_error");
    const double bound = 10.0 * c * lambda * lambda * std::sqrt(dt);
    r.verdict("gbm_strong_error", e.mean <= bound, "E|err| " + fmt(e.mean) + " <= " + fmt(bound));
    r.estimates.push_back(std::move(e));
  }
  {
    // Brownian off, eta = gamma u (|z| ^ 1) on one atom of rate Lambda:
    // u(T) = c exp(-gamma kappa Lambda T) (1 + gamma kappa)^N(T)
    const double c = 1.0, gamma = 0.6, z = 0.5, rate = 2.0, T = 1.0, dt = 1e-3;
    const double kappa = jump_cap(z);
    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    auto s = constant_problem(c, 4, L);
    JumpCoefficient eta;
    eta.eval = [gamma](double, double u, double zz) { return gamma * u * jump_cap(zz); };
    eta.lambda_star = gamma;
    eta.growth = gamma;
    eta.name = "linear";
    s.eta = eta;
    s.measure = LevyMeasure({{z, rate}});
    const Grid grid = Grid::of(s);
    auto per_path = [&](const PathContext& ctx) {
      const auto noise = make_noise_path(ctx.base_seed, ctx.path_index, dt, steps, s.measure);
      const auto traj = solve_path(s, grid, 0.0, noise, final_only(T), quiet());
      const double exact = c * std::exp(-gamma * kappa * rate * T) *
                           std::pow(1.0 + gamma * kappa, static_cast<double>(noise.jump_count()));
      return std::abs(traj.final_state().values[0] - exact) / exact;
    };
    const std::size_t n = std::max<std::size_t>(cfg.n_paths, 2);
    std::vector<double> errs(n);
    parallel_for(n, opts.threads, [&](std::size_t i) { errs[i] = per_path(PathContext{cfg.base_seed, i}); });
    auto e = summarize("jump_relative_error", errs, 0, cfg.base_seed);
    const double worst = *std::max_element(errs.begin(), errs.end());
    r.values.push_back({"jump_relative_error_max", worst});
    r.verdict("jump_exponential", worst <= 5.0 * dt, "max relative error " + fmt(worst) + " <= " + fmt(5.0 * dt));
    r.estimates.push_back(std::move(e));
  }
  r.wall_seconds = clock.seconds();
  return r;
}

/// Dispatches on the subcommand name.
inline Report run_experiment(const std::string& name, const RunConfig& cfg, const RunOptions& opts = {}) {
  if (name == "validate") return run_validate(cfg);
  if (name == "oracle") return run_oracles(cfg, opts);
  if (name == "bv") return run_bv(cfg, opts);
  if (name == "rate") return run_viscosity_rate(cfg, opts);
  if (name == "cdep") return run_continuous_dependence(cfg, opts);
  if (name == "fracbv") return run_fractional_bv(cfg, opts);
  if (name == "entropy") return run_entropy_residual(cfg, opts);
  throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace levyvisc
