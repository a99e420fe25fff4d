#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "levyvisc/model/coefficient.hpp"
#include "levyvisc/model/entropy.hpp"
#include "levyvisc/model/problem.hpp"
#include "levyvisc/noise/levy_measure.hpp"

namespace levyvisc {

struct AssumptionCheck {
  std::string id;      // "A2.monotone", "B4.envelope", ...
  bool passed = true;
  std::string detail;
  std::optional<double> witness;  // a point where the check failed
  std::optional<double> value;    // measured quantity, when one exists
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed; });
  }

  const AssumptionCheck* find(const std::string& id) const {
    for (const auto& c : checks) {
      if (c.id == id) return &c;
    }
    return nullptr;
  }

  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks) {
      if (!c.passed) out.push_back(c.id + ": " + c.detail);
    }
    return out;
  }
};

struct ValidationOptions {
  double u_range = 0.0;          // 0 selects max(1, 2 max|u0|)
  std::size_t u_points = 401;
  std::size_t x_points = 64;
  double tolerance = 1e-6;       // relative slack on declared constants
  bool fractional_regime = false;  // adds the B5 sqrt(A') Lipschitz check
};

namespace detail {

inline std::vector<double> uniform_points(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

inline std::string fmt_point(const char* label, double v) {
  std::ostringstream os;
  os << label << " = " << v;
  return os.str();
}

// Checks |c(x,u) - c(x,v)| <= lip |u - v| on adjacent grid pairs and the
// pairs (u, 0).
inline AssumptionCheck lipschitz_in_u(const std::string& id, const CoefficientFn& c, std::span<const double> us,
                                      std::span<const double> xs, double tol) {
  AssumptionCheck chk{id, true, "", std::nullopt, 0.0};
  double worst = 0.0;
  for (double x : xs) {
    for (std::size_t i = 0; i < us.size(); ++i) {
      const double u = us[i];
      auto test = [&](double v) {
        if (u == v) return;
        const double q = std::abs(c(x, u) - c(x, v)) / std::abs(u - v);
        worst = std::max(worst, q);
        if (q > c.lipschitz * (1.0 + tol) + 1e-12 && chk.passed) {
          chk.passed = false;
          chk.witness = u;
          chk.detail = fmt_point("difference quotient exceeds declared Lipschitz constant near u", u);
        }
      };
      if (i + 1 < us.size()) test(us[i + 1]);
      test(0.0);
    }
  }
  chk.value = worst;
  if (chk.passed) chk.detail = "max sampled quotient within declared constant";
  return chk;
}

inline AssumptionCheck zero_at_zero(const std::string& id, const CoefficientFn& c, std::span<const double> xs) {
  AssumptionCheck chk{id, true, "vanishes at u = 0", std::nullopt, std::nullopt};
  for (double x : xs) {
    const double v = c(x, 0.0);
    if (std::abs(v) > 1e-12) {
      chk.passed = false;
      chk.witness = x;
      chk.value = v;
      chk.detail = fmt_point("nonzero at u = 0 for x", x);
      break;
    }
  }
  return chk;
}

}  // namespace detail

/// Grid checks of the standing hypotheses on the data of one problem.
/// Failures are report entries; nothing throws.
inline ValidationReport validate_assumptions(const ProblemSpec& spec, const ValidationOptions& opts = {}) {
  ValidationReport rep;
  const double tol = opts.tolerance;

  double u0max = 0.0;
  bool finite = !spec.u0.empty();
  double l1 = 0.0, l2 = 0.0, tv = 0.0;
  for (std::size_t j = 0; j < spec.u0.size(); ++j) {
    const double v = spec.u0[j];
    if (!std::isfinite(v)) finite = false;
    u0max = std::max(u0max, std::abs(v));
    l1 += std::abs(v) * spec.dx();
    l2 += v * v * spec.dx();
    tv += std::abs(spec.u0[(j + 1) % spec.u0.size()] - v);
  }
  {
    AssumptionCheck chk{"A1.initial", finite && std::isfinite(l1 + l2 + tv), "", std::nullopt, tv};
    std::ostringstream os;
    os << "L1 = " << l1 << ", L2^2 = " << l2 << ", TV = " << tv;
    chk.detail = os.str();
    rep.checks.push_back(chk);
  }

  const double range = opts.u_range > 0.0 ? opts.u_range : std::max(1.0, 2.0 * u0max);
  const auto us = detail::uniform_points(-range, range, std::max<std::size_t>(opts.u_points, 3));
  const std::vector<double> origin{0.0};
  const auto xs_all = detail::uniform_points(0.0, spec.domain_length, std::max<std::size_t>(opts.x_points, 2));

  // A2: diffusion
  rep.checks.push_back(detail::zero_at_zero("A2.zero", spec.diffusion, origin));
  rep.checks.push_back(detail::lipschitz_in_u("A2.lipschitz", spec.diffusion, us, origin, tol));
  {
    AssumptionCheck chk{"A2.monotone", true, "A nondecreasing on the validation grid", std::nullopt, std::nullopt};
    for (std::size_t i = 0; i + 1 < us.size(); ++i) {
      const double d = spec.diffusion(us[i + 1]) - spec.diffusion(us[i]);
      if (d < -1e-12) {
        chk.passed = false;
        chk.witness = us[i];
        chk.value = d / (us[i + 1] - us[i]);
        chk.detail = detail::fmt_point("A decreasing near u", us[i]);
        break;
      }
    }
    rep.checks.push_back(chk);
  }

  // A3: flux
  rep.checks.push_back(detail::zero_at_zero("A3.zero", spec.flux, origin));
  rep.checks.push_back(detail::lipschitz_in_u("A3.lipschitz", spec.flux, us, origin, tol));

  // A4 / B31: Brownian coefficient
  const auto sigma_xs = spec.sigma.x_dependent ? std::span<const double>(xs_all) : std::span<const double>(origin);
  rep.checks.push_back(detail::zero_at_zero(spec.sigma.x_dependent ? "B31.zero" : "A4.zero", spec.sigma, sigma_xs));
  rep.checks.push_back(
      detail::lipschitz_in_u(spec.sigma.x_dependent ? "B31.lipschitz" : "A4.lipschitz", spec.sigma, us, sigma_xs, tol));
  if (spec.sigma.x_dependent) {
    AssumptionCheck chk{"B31.lipschitz_x", true, "", std::nullopt, 0.0};
    double worst = 0.0;
    for (double u : us) {
      for (std::size_t i = 0; i + 1 < xs_all.size(); ++i) {
        const double q = std::abs(spec.sigma(xs_all[i + 1], u) - spec.sigma(xs_all[i], u)) / (xs_all[i + 1] - xs_all[i]);
        worst = std::max(worst, q);
        if (q > spec.sigma.lipschitz_x * (1.0 + tol) + 1e-12 && chk.passed) {
          chk.passed = false;
          chk.witness = xs_all[i];
          chk.detail = detail::fmt_point("x-difference quotient exceeds K1 near x", xs_all[i]);
        }
      }
    }
    chk.value = worst;
    if (chk.passed) chk.detail = "x-Lipschitz within declared K1";
    rep.checks.push_back(chk);
  }

  // A5 / B3 / B4: jump coefficient
  const bool xdep = spec.eta.x_dependent;
  const std::string a5 = xdep ? "B3" : "A5";
  {
    const double ls = spec.eta.lambda_star;
    AssumptionCheck chk{a5 + ".lambda_star", ls >= 0.0 && ls < 1.0, "", std::nullopt, ls};
    chk.detail = chk.passed ? "lambda* in [0, 1)" : "lambda* must lie in (0, 1)";
    rep.checks.push_back(chk);
  }
  std::vector<double> zs;
  for (const auto& a : spec.measure.atoms()) zs.push_back(a.z);
  if (zs.empty()) zs = {-2.0, -0.5, 0.5, 2.0};
  const auto eta_xs = xdep ? std::span<const double>(xs_all) : std::span<const double>(origin);
  {
    AssumptionCheck zero{a5 + ".zero", true, "eta(x, 0; z) = 0", std::nullopt, std::nullopt};
    AssumptionCheck lip{a5 + ".lipschitz", true, "", std::nullopt, 0.0};
    AssumptionCheck growth{a5 + ".growth", true, "", std::nullopt, 0.0};
    const double c_bound = spec.eta.growth > 0.0 ? spec.eta.growth : spec.eta.lambda_star;
    double worst_lip = 0.0, worst_growth = 0.0;
    for (double x : eta_xs) {
      for (double z : zs) {
        const double cap = jump_cap(z);
        if (std::abs(spec.eta(x, 0.0, z)) > 1e-12 && zero.passed) {
          zero.passed = false;
          zero.witness = z;
          zero.detail = detail::fmt_point("eta(x, 0; z) != 0 at z", z);
        }
        for (std::size_t i = 0; i < us.size(); ++i) {
          const double u = us[i];
          const double e = spec.eta(x, u, z);
          if (u != 0.0) {
            const double g = std::abs(e) / (std::abs(u) * cap);
            worst_growth = std::max(worst_growth, g);
            if (g > c_bound * (1.0 + tol) + 1e-12 && growth.passed) {
              growth.passed = false;
              growth.witness = u;
              growth.detail = detail::fmt_point("|eta| exceeds C |u| (|z| ^ 1) at u", u);
            }
          }
          if (i + 1 < us.size()) {
            const double v = us[i + 1];
            const double q = std::abs(e - spec.eta(x, v, z)) / (std::abs(u - v) * cap);
            worst_lip = std::max(worst_lip, q);
            if (q > spec.eta.lambda_star * (1.0 + tol) + 1e-12 && lip.passed) {
              lip.passed = false;
              lip.witness = u;
              lip.detail = detail::fmt_point("u-difference quotient exceeds lambda* near u", u);
            }
          }
        }
      }
    }
    lip.value = worst_lip;
    growth.value = worst_growth;
    if (lip.passed) lip.detail = "u-Lipschitz within lambda* (|z| ^ 1)";
    if (growth.passed) growth.detail = "|eta(u;z)| <= C |u| (|z| ^ 1)";
    rep.checks.push_back(zero);
    rep.checks.push_back(lip);
    rep.checks.push_back(growth);
  }
  if (xdep) {
    AssumptionCheck chk{"B3.lipschitz_x", true, "", std::nullopt, 0.0};
    double worst = 0.0;
    for (double z : zs) {
      for (double u : us) {
        for (std::size_t i = 0; i + 1 < xs_all.size(); ++i) {
          const double q = std::abs(spec.eta(xs_all[i + 1], u, z) - spec.eta(xs_all[i], u, z)) /
                           ((xs_all[i + 1] - xs_all[i]) * jump_cap(z));
          worst = std::max(worst, q);
          if (q > spec.eta.lipschitz_x * (1.0 + tol) + 1e-12 && chk.passed) {
            chk.passed = false;
            chk.witness = xs_all[i];
            chk.detail = detail::fmt_point("x-difference quotient exceeds K2 near x", xs_all[i]);
          }
        }
      }
    }
    chk.value = worst;
    if (chk.passed) chk.detail = "x-Lipschitz within declared K2";
    rep.checks.push_back(chk);
  }
  if (spec.eta.envelope) {
    AssumptionCheck chk{"B4.envelope", true, "|eta| <= g(x) (1 + |u|) (|z| ^ 1)", std::nullopt, std::nullopt};
    const auto& g = *spec.eta.envelope;
    for (double x : xs_all) {
      for (double z : zs) {
        for (double u : us) {
          if (std::abs(spec.eta(x, u, z)) > g(x) * (1.0 + std::abs(u)) * jump_cap(z) * (1.0 + tol) + 1e-12) {
            chk.passed = false;
            chk.witness = x;
            chk.detail = detail::fmt_point("envelope violated at x", x);
            break;
          }
        }
        if (!chk.passed) break;
      }
      if (!chk.passed) break;
    }
    rep.checks.push_back(chk);
  }

  // A6
  {
    const double v = levy_integrability(spec.measure);
    AssumptionCheck chk{"A6.integrability", std::isfinite(v), "int (1 ^ |z|^2) m(dz)", std::nullopt, v};
    rep.checks.push_back(chk);
  }

  // B5: only Lipschitz continuity of sqrt(A') is checked; the vanishing
  // ratio of its modulus at 0 is taken as declared. A grid quotient that
  // keeps growing under refinement flags a non-Lipschitz sqrt(A').
  if (opts.fractional_regime) {
    AssumptionCheck chk{"B5.sqrt_slope_lipschitz", true, "", std::nullopt, 0.0};
    auto quotient = [&](std::size_t n) {
      const auto pts = detail::uniform_points(-range, range, n);
      double worst = 0.0;
      double prev = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        double cur = 0.0;
        try {
          cur = sqrt_diffusion_slope(spec.diffusion, pts[i]);
        } catch (const MonotonicityViolation&) {
          cur = 0.0;
        }
        if (i > 0) worst = std::max(worst, std::abs(cur - prev) / (pts[i] - pts[i - 1]));
        prev = cur;
      }
      return worst;
    };
    const double coarse = quotient(opts.u_points);
    const double fine = quotient(4 * opts.u_points);
    chk.value = fine;
    if (fine > 1.5 * coarse + 1e-9) {
      chk.passed = false;
      chk.detail = "sqrt(A') difference quotients grow under refinement";
    } else {
      chk.detail = "sqrt(A') Lipschitz on the grid (modulus ratio condition declared)";
    }
    rep.checks.push_back(chk);
  }
  return rep;
}

}  // namespace levyvisc
