#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "levyvisc/experiments/config.hpp"
#include "levyvisc/model/coefficient.hpp"
#include "levyvisc/model/problem.hpp"
#include "levyvisc/noise/levy_measure.hpp"
#include "levyvisc/noise/noise_path.hpp"

namespace levyvisc {

// Selectors resolved from the "problem" block of a config. Every selector is
// {"type": name, ...parameters}; unknown types and keys are errors.

inline CoefficientFn make_flux(const json& j) {
  using namespace config_detail;
  const std::string type = string_or(j, "type", "zero", "flux");
  if (type == "zero") {
    allow_keys(j, {"type"}, "flux");
    return CoefficientFn::zero();
  }
  if (type == "linear") {
    allow_keys(j, {"type", "c"}, "flux");
    const double c = number(j, "c", "flux");
    return CoefficientFn::from_u([c](double u) { return c * u; }, std::abs(c), 0.0, "linear");
  }
  if (type == "burgers") {
    allow_keys(j, {"type", "scale", "lipschitz"}, "flux");
    const double s = number_or(j, "scale", 1.0, "flux");
    const double lip = number(j, "lipschitz", "flux");
    if (!(lip > 0.0)) throw ConfigError("flux.lipschitz: must be positive");
    return CoefficientFn::from_u([s](double u) { return 0.5 * s * u * u; }, lip, std::abs(s), "burgers");
  }
  throw ConfigError("flux.type: unknown selector '" + type + "'");
}

inline CoefficientFn make_diffusion(const json& j) {
  using namespace config_detail;
  const std::string type = string_or(j, "type", "zero", "diffusion");
  if (type == "zero") {
    allow_keys(j, {"type"}, "diffusion");
    return CoefficientFn::zero();
  }
  if (type == "linear") {
    allow_keys(j, {"type", "a"}, "diffusion");
    const double a = number(j, "a", "diffusion");
    return CoefficientFn::from_u([a](double u) { return a * u; }, std::abs(a), 0.0, "linear");
  }
  if (type == "ramp") {
    // degenerate: A' = 0 for u < 0
    allow_keys(j, {"type", "a"}, "diffusion");
    const double a = number(j, "a", "diffusion");
    return CoefficientFn::from_u([a](double u) { return a * std::max(u, 0.0); }, std::abs(a), std::nullopt, "ramp");
  }
  throw ConfigError("diffusion.type: unknown selector '" + type + "'");
}

/// 1 + amplitude sin(2 pi periods x / L).
inline std::function<double(double)> modulation(double amplitude, double periods, double length) {
  return [=](double x) { return 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * periods * x / length); };
}

inline CoefficientFn make_sigma(const json& j, double length, double u_range) {
  using namespace config_detail;
  const std::string type = string_or(j, "type", "zero", "sigma");
  if (type == "zero") {
    allow_keys(j, {"type"}, "sigma");
    return CoefficientFn::zero();
  }
  if (type == "linear") {
    allow_keys(j, {"type", "gamma"}, "sigma");
    const double g = number(j, "gamma", "sigma");
    return CoefficientFn::from_u([g](double u) { return g * u; }, std::abs(g), 0.0, "linear");
  }
  if (type == "sine") {
    allow_keys(j, {"type", "gamma"}, "sigma");
    const double g = number(j, "gamma", "sigma");
    return CoefficientFn::from_u([g](double u) { return g * std::sin(u); }, std::abs(g), std::abs(g), "sine");
  }
  if (type == "modulated") {
    allow_keys(j, {"type", "gamma", "amplitude", "periods"}, "sigma");
    const double g = number(j, "gamma", "sigma");
    const double amp = number(j, "amplitude", "sigma");
    const double per = number_or(j, "periods", 1.0, "sigma");
    auto m = modulation(amp, per, length);
    CoefficientFn c;
    c.eval = [g, m](double x, double u) { return g * m(x) * u; };
    c.lipschitz = std::abs(g) * (1.0 + std::abs(amp));
    c.second_derivative_bound = 0.0;
    c.x_dependent = true;
    c.lipschitz_x = std::abs(g) * std::abs(amp) * 2.0 * std::numbers::pi * std::abs(per) / length * u_range;
    c.name = "modulated";
    return c;
  }
  throw ConfigError("sigma.type: unknown selector '" + type + "'");
}

inline JumpCoefficient make_eta(const json& j, double length, double u_range) {
  using namespace config_detail;
  const std::string type = string_or(j, "type", "zero", "eta");
  if (type == "zero") {
    allow_keys(j, {"type"}, "eta");
    return JumpCoefficient::zero();
  }
  if (type == "linear") {
    allow_keys(j, {"type", "gamma"}, "eta");
    const double g = number(j, "gamma", "eta");
    JumpCoefficient e;
    e.eval = [g](double, double u, double z) { return g * u * jump_cap(z); };
    e.lambda_star = std::abs(g);
    e.growth = std::abs(g);
    e.name = "linear";
    return e;
  }
  if (type == "modulated") {
    // eta(x, u; z) = gamma m(x) u (|z| ^ 1) with envelope g(x) = |gamma| m(x)
    allow_keys(j, {"type", "gamma", "amplitude", "periods"}, "eta");
    const double g = number(j, "gamma", "eta");
    const double amp = number(j, "amplitude", "eta");
    const double per = number_or(j, "periods", 1.0, "eta");
    if (std::abs(amp) >= 1.0) throw ConfigError("eta.amplitude: must satisfy |amplitude| < 1");
    auto m = modulation(amp, per, length);
    JumpCoefficient e;
    e.eval = [g, m](double x, double u, double z) { return g * m(x) * u * jump_cap(z); };
    e.lambda_star = std::abs(g) * (1.0 + std::abs(amp));
    e.growth = e.lambda_star;
    e.x_dependent = true;
    e.lipschitz_x = std::abs(g) * std::abs(amp) * 2.0 * std::numbers::pi * std::abs(per) / length * u_range;
    e.envelope = [g, m](double x) { return std::abs(g) * m(x); };
    e.name = "modulated";
    return e;
  }
  throw ConfigError("eta.type: unknown selector '" + type + "'");
}

inline LevyMeasure make_measure(const json& j) {
  using namespace config_detail;
  if (j.is_null()) return {};
  allow_keys(j, {"atoms", "truncation"}, "measure");
  if (j.contains("truncation") && !j.at("truncation").is_null()) {
    throw ConfigError("measure.truncation: infinite-activity measures are not supported");
  }
  std::vector<LevyAtom> atoms;
  if (j.contains("atoms")) {
    if (!j.at("atoms").is_array()) throw ConfigError("measure.atoms: expected an array");
    for (const auto& a : j.at("atoms")) {
      allow_keys(a, {"z", "weight"}, "measure.atoms[]");
      atoms.push_back({number(a, "z", "measure.atoms[]"), number(a, "weight", "measure.atoms[]")});
    }
  }
  try {
    return LevyMeasure(std::move(atoms));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("measure: ") + e.what());
  }
}

/// Smooth compactly supported bump cos^4(pi (x - c) / (2 r)).
inline double smooth_bump(double x, double center, double radius) {
  const double s = (x - center) / radius;
  if (std::abs(s) >= 1.0) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * s);
  return c * c * c * c;
}

/// Initial profile sampled at the cell centres of `cells` cells.
inline std::vector<double> make_initial(const json& j, std::size_t cells, double length) {
  using namespace config_detail;
  const std::string type = string_or(j, "type", "zero", "initial");
  if (type == "zero") {
    allow_keys(j, {"type"}, "initial");
    return std::vector<double>(cells, 0.0);
  }
  if (type == "constant") {
    allow_keys(j, {"type", "value"}, "initial");
    return std::vector<double>(cells, number(j, "value", "initial"));
  }
  if (type == "indicator") {
    allow_keys(j, {"type", "left", "right", "height"}, "initial");
    const double a = number(j, "left", "initial"), b = number(j, "right", "initial");
    const double hgt = number_or(j, "height", 1.0, "initial");
    return sample_cells([=](double x) { return (x >= a && x < b) ? hgt : 0.0; }, cells, length);
  }
  if (type == "bump") {
    allow_keys(j, {"type", "center", "radius", "height"}, "initial");
    const double c = number(j, "center", "initial"), r = number(j, "radius", "initial");
    const double hgt = number_or(j, "height", 1.0, "initial");
    return sample_cells([=](double x) { return hgt * smooth_bump(x, c, r); }, cells, length);
  }
  if (type == "sine") {
    allow_keys(j, {"type", "amplitude", "periods"}, "initial");
    const double amp = number(j, "amplitude", "initial");
    const double per = number_or(j, "periods", 1.0, "initial");
    return sample_cells([=](double x) { return amp * std::sin(2.0 * std::numbers::pi * per * x / length); }, cells,
                        length);
  }
  if (type == "rough") {
    // Brownian-like (Holder-1/2) profile on [left, right] under a smooth
    // window; the random walk is fixed by `seed` and resolved on a fine
    // reference lattice so every grid samples the same function.
    allow_keys(j, {"type", "left", "right", "amplitude", "seed"}, "initial");
    const double a = number(j, "left", "initial"), b = number(j, "right", "initial");
    const double amp = number_or(j, "amplitude", 1.0, "initial");
    const auto seed = static_cast<std::uint64_t>(number_or(j, "seed", 7.0, "initial"));
    constexpr std::size_t kLattice = 4096;
    RngStream rng(seed, 0, RngStream::kUser);
    std::vector<double> walk(kLattice + 1, 0.0);
    const double h = 1.0 / kLattice;
    for (std::size_t i = 1; i <= kLattice; ++i) walk[i] = walk[i - 1] + std::sqrt(h) * rng.normal();
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    return sample_cells(
        [&](double x) {
          if (x <= a || x >= b) return 0.0;
          const double s = (x - a) / (b - a);
          const auto i = std::min(static_cast<std::size_t>(s * kLattice), kLattice);
          return amp * (0.5 + walk[i]) * smooth_bump(x, c, r);
        },
        cells, length);
  }
  throw ConfigError("initial.type: unknown selector '" + type + "'");
}

/// Builds the problem on a grid of `cells` cells. The u-range used for the
/// declared x-Lipschitz constants matches the default validation range.
inline ProblemSpec build_problem(const json& j, std::size_t cells, double length) {
  using namespace config_detail;
  allow_keys(j, {"flux", "diffusion", "sigma", "eta", "measure", "initial"}, "problem");
  ProblemSpec spec;
  spec.domain_length = length;
  spec.u0 = make_initial(j.value("initial", json::object()), cells, length);
  double umax = 0.0;
  for (double v : spec.u0) umax = std::max(umax, std::abs(v));
  const double u_range = std::max(1.0, 2.0 * umax);
  spec.flux = make_flux(j.value("flux", json::object()));
  spec.diffusion = make_diffusion(j.value("diffusion", json::object()));
  spec.sigma = make_sigma(j.value("sigma", json::object()), length, u_range);
  spec.eta = make_eta(j.value("eta", json::object()), length, u_range);
  spec.measure = make_measure(j.value("measure", json()));
  return spec;
}

// Perturbations used by the continuous-dependence driver.

inline ProblemSpec perturb_flux(ProblemSpec spec, double h) {
  // g = f + h id, so g' = f' + h
  auto f = spec.flux;
  CoefficientFn g;
  g.eval = [f, h](double x, double u) { return f(x, u) + h * u; };
  g.lipschitz = f.lipschitz + std::abs(h);
  g.second_derivative_bound = f.second_derivative_bound;
  g.name = "perturbed";
  spec.flux = g;
  return spec;
}

inline ProblemSpec perturb_diffusion(ProblemSpec spec, double h) {
  // B = A + h id
  auto a = spec.diffusion;
  CoefficientFn b;
  b.eval = [a, h](double x, double u) { return a(x, u) + h * u; };
  b.lipschitz = a.lipschitz + std::abs(h);
  b.second_derivative_bound = a.second_derivative_bound;
  b.name = "perturbed";
  spec.diffusion = b;
  return spec;
}

inline ProblemSpec perturb_sigma(ProblemSpec spec, double h) {
  // sigma~ = (1 + h) sigma
  auto s = spec.sigma;
  auto t = s;
  t.eval = [s, h](double x, double u) { return (1.0 + h) * s(x, u); };
  t.lipschitz = s.lipschitz * std::abs(1.0 + h);
  t.lipschitz_x = s.lipschitz_x * std::abs(1.0 + h);
  t.name = "perturbed";
  spec.sigma = t;
  return spec;
}

inline ProblemSpec perturb_eta(ProblemSpec spec, double h) {
  // eta~ = (1 + h) eta
  auto e = spec.eta;
  auto t = e;
  t.eval = [e, h](double x, double u, double z) { return (1.0 + h) * e(x, u, z); };
  t.lambda_star = e.lambda_star * std::abs(1.0 + h);
  t.growth = e.growth * std::abs(1.0 + h);
  t.lipschitz_x = e.lipschitz_x * std::abs(1.0 + h);
  if (e.envelope) {
    auto g = *e.envelope;
    t.envelope = [g, h](double x) { return std::abs(1.0 + h) * g(x); };
  }
  t.name = "perturbed";
  spec.eta = t;
  return spec;
}

}  // namespace levyvisc
