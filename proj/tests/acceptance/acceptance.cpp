// One line per acceptance criterion; exit status 1 if any line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <thread>

#include "levyvisc/levyvisc.hpp"

#ifndef LEVYVISC_CONFIG_DIR
#define LEVYVISC_CONFIG_DIR "configs"
#endif

using namespace levyvisc;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

const std::filesystem::path kConfigs = LEVYVISC_CONFIG_DIR;
const std::filesystem::path kOut = "acceptance_out";

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

Report run_config(const std::string& file, unsigned threads = worker_count()) {
  const auto cfg = load_config(read_json_file((kConfigs / file).string()));
  auto r = run_experiment(cfg.experiment.driver == "" ? "validate" : cfg.experiment.driver, cfg, {threads, true});
  emit_report(r, kOut / std::filesystem::path(file).stem(), true);
  return r;
}

std::string verdict_line(const Report& r) {
  std::string s;
  for (const auto& v : r.verdicts) s += v.name + "=" + to_string(v.status) + " ";
  return s;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

bool verdict_passes(const Report& r, const std::string& name) {
  const auto* v = r.find_verdict(name);
  return v && v->status == VerdictStatus::Pass;
}

Outcome beta_family_suite() {
  std::size_t violations = 0;
  for (double xi : {0.05, 0.1, 0.5, 1.0}) {
    const auto b = make_beta_family(xi);
    for (int i = 0; i < 10000; ++i) {
      const double r = -5.0 + 10.0 * i / 9999.0;
      const double tol = 1e-12;
      bool ok = b.beta(0.0) == 0.0 && std::abs(b.beta(-r) - b.beta(r)) <= tol &&
                std::abs(b.beta_prime(-r) + b.beta_prime(r)) <= tol && b.beta_double_prime(r) >= 0.0;
      ok = ok && std::abs(b.beta_prime(r)) <= 1.0 + tol;
      if (std::abs(r) >= xi) ok = ok && std::abs(b.beta_prime(r) - (r > 0 ? 1.0 : -1.0)) <= tol;
      ok = ok && b.beta(r) <= std::abs(r) + tol && b.beta(r) >= std::abs(r) - b.M1() * xi - tol;
      ok = ok && b.beta_double_prime(r) <= b.M2() / xi + tol;
      if (std::abs(r) > xi) ok = ok && b.beta_double_prime(r) == 0.0;
      if (r > 0) ok = ok && r * r * b.beta_double_prime(r) <= 2.0 * b.beta(r) + tol;
      for (double alpha : {1.0, 1.5, 3.0}) ok = ok && b.beta(alpha * r) <= alpha * alpha * b.beta(r) + tol;
      if (!ok) ++violations;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations over 4 xi x 10^4 points"};
}

Outcome entropy_flux_bounds() {
  const auto f = CoefficientFn::from_u([](double u) { return 0.5 * u * u; }, 2.0, 1.0, "burgers");
  const double h = 0.3;
  const auto g = CoefficientFn::from_u([h](double u) { return 0.5 * u * u + h * u; }, 2.3, 1.0, "perturbed");
  const double step = 1e-4;
  double worst_sym = 0.0, worst_diff = 0.0;
  bool ok = true;
  for (double xi : {0.1, 0.5}) {
    const auto fam = make_beta_family(xi);
    const double bound_sym = fam.M2() * xi * 1.0 + 1e-6;
    const double bound_diff = h + 1e-6;
    for (int i = 0; i < 100; ++i) {
      const double u = -1.0 + 2.0 * i / 99.0;
      for (int k = 0; k < 100; ++k) {
        const double v = -1.0 + 2.0 * k / 99.0;
        auto sym = [&](double w) { return entropy_flux(f, fam, u, w) - entropy_flux(f, fam, w, u); };
        auto diff = [&](double w) { return entropy_flux(f, fam, w, u) - entropy_flux(g, fam, w, u); };
        const double d_sym = std::abs(sym(v + step) - sym(v - step)) / (2 * step);
        const double d_diff = std::abs(diff(v + step) - diff(v - step)) / (2 * step);
        worst_sym = std::max(worst_sym, d_sym / (bound_sym - 1e-6));
        worst_diff = std::max(worst_diff, d_diff);
        ok = ok && d_sym <= bound_sym && d_diff <= bound_diff;
      }
    }
  }
  return {ok, "max |d_v sym| / (M2 xi |f''|) = " + num(worst_sym) + ", max |d_v diff| = " + num(worst_diff) +
                  " vs |f'-g'| = " + num(h)};
}

Outcome from_report(const Report& r, double seconds, double limit) {
  return {r.all_pass() && seconds < limit, verdict_line(r) + "(" + num(seconds) + " s, limit " + num(limit) + " s)"};
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.ok) ++failures;
    std::printf("criterion %2d  %s  %-22s %s [%.1f s]\n", id, o.ok ? "PASS" : "FAIL", name, o.detail.c_str(), since(t0));
    std::fflush(stdout);
  };

  report(1, "beta_family", [] {
    const auto t0 = std::chrono::steady_clock::now();
    auto o = beta_family_suite();
    const double s = since(t0);
    o.ok = o.ok && s < 1.0;
    return o;
  });
  report(2, "entropy_flux_bounds", [] {
    const auto t0 = std::chrono::steady_clock::now();
    auto o = entropy_flux_bounds();
    const double s = since(t0);
    o.ok = o.ok && s < 5.0;
    o.detail += " (" + num(s) + " s)";
    return o;
  });
  report(3, "oracles", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_config("oracle.json");
    return from_report(r, since(t0), 120.0);
  });

  Report bv;
  report(4, "bv_bound", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    bv = run_config("bv.json");
    const double s = since(t0);
    std::string detail;
    for (const auto& e : bv.estimates) {
      if (e.name.rfind("tv@", 0) == 0) detail += e.name + "=" + num(e.mean) + "+-" + num(e.half_width_95) + " ";
    }
    return Outcome{verdict_passes(bv, "bv_bound") && s < 600.0, detail + "(" + num(s) + " s)"};
  });
  report(5, "viscosity_rate", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_config("rate.json");
    auto o = from_report(r, since(t0), 900.0);
    if (!r.rates.empty()) o.detail = "slope " + num(r.rates[0].slope) + " " + o.detail;
    o.ok = o.ok && verdict_passes(r, "viscosity_rate") && verdict_passes(r, "errors_decreasing");
    return o;
  });
  report(6, "continuous_dependence", [] {
    bool ok = true;
    std::string detail;
    for (const char* ch : {"flux", "diffusion", "sigma", "eta"}) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = run_config(std::string("cdep_") + ch + ".json");
      const double s = since(t0);
      ok = ok && r.all_pass() && verdict_passes(r, "h0_exact") && verdict_passes(r, "cdep_slope") && s < 1200.0;
      detail += std::string(ch) + ": slope " + (r.rates.empty() ? "n/a" : num(r.rates[0].slope)) + " " +
                (r.all_pass() ? "ok" : "FAIL") + " (" + num(s) + " s); ";
    }
    return Outcome{ok, detail};
  });
  report(7, "fractional_bv", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_config("fracbv.json");
    auto o = from_report(r, since(t0), 900.0);
    for (const auto& f : r.rates) o.detail = f.name + " " + num(f.slope) + " " + o.detail;
    o.ok = o.ok && verdict_passes(r, "fracbv_slope") && verdict_passes(r, "fracbv_monotone") &&
           verdict_passes(r, "control_slope");
    return o;
  });
  report(8, "moment_l1_monitors", [&] {
    if (bv.verdicts.empty()) return Outcome{false, "criterion 4 produced no report"};
    const auto* m = bv.find_verdict("moment_monitor");
    const auto* l = bv.find_verdict("l1_monitor");
    return Outcome{verdict_passes(bv, "moment_monitor") && verdict_passes(bv, "l1_monitor"),
                   (m ? m->detail : "") + " | " + (l ? l->detail : "")};
  });
  report(9, "entropy_residual", [] {
    bool ok = true;
    std::string detail;
    for (const char* file : {"entropy_shock.json", "entropy_stochastic.json"}) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = run_config(file);
      const double s = since(t0);
      ok = ok && r.all_pass() && r.verdicts.size() == 5 && s < 600.0;
      detail += std::string(file) + ": " + std::to_string(r.verdicts.size() - r.failing().size()) + "/" +
                std::to_string(r.verdicts.size()) + " pairs (" + num(s) + " s); ";
    }
    return Outcome{ok, detail};
  });
  report(10, "determinism", [] {
    const auto cfg = load_config(read_json_file((kConfigs / "bv.json").string()));
    const auto one = summary_csv(run_bv(cfg, {1, false}));
    const auto eight = summary_csv(run_bv(cfg, {8, false}));
    return Outcome{one == eight, std::string("bv summary.csv ") + (one == eight ? "identical" : "differs") +
                                     " for 1 and 8 workers (" + std::to_string(one.size()) + " bytes)"};
  });

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
