#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "levyvisc/estimators/monte_carlo.hpp"
#include "levyvisc/estimators/rate_fit.hpp"
#include "levyvisc/experiments/config.hpp"

namespace levyvisc {

enum class VerdictStatus { Pass, Fail, Degenerate };

inline const char* to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Pass: return "PASS";
    case VerdictStatus::Fail: return "FAIL";
    case VerdictStatus::Degenerate: return "DEGENERATE";
  }
  return "?";
}

struct Verdict {
  std::string name;
  VerdictStatus status = VerdictStatus::Fail;
  std::string detail;

  bool failed() const { return status == VerdictStatus::Fail; }
};

struct NamedValue {
  std::string name;
  double value;
};

struct SnapshotDump {
  std::string name;
  double dx;
  std::vector<double> values;
};

struct Report {
  std::string experiment;
  json config;
  std::vector<EstimateSummary> estimates;
  std::vector<RateFit> rates;
  std::vector<NamedValue> values;
  std::vector<Verdict> verdicts;
  std::vector<SnapshotDump> snapshots;
  double wall_seconds = 0.0;

  bool all_pass() const {
    for (const auto& v : verdicts) {
      if (v.failed()) return false;
    }
    return true;
  }

  std::vector<std::string> failing() const {
    std::vector<std::string> out;
    for (const auto& v : verdicts) {
      if (v.failed()) out.push_back(v.name);
    }
    return out;
  }

  void verdict(std::string name, bool ok, std::string detail) {
    verdicts.push_back({std::move(name), ok ? VerdictStatus::Pass : VerdictStatus::Fail, std::move(detail)});
  }

  const EstimateSummary* estimate(const std::string& name) const {
    for (const auto& e : estimates) {
      if (e.name == name) return &e;
    }
    return nullptr;
  }

  const RateFit* rate(const std::string& name) const {
    for (const auto& r : rates) {
      if (r.name == name) return &r;
    }
    return nullptr;
  }

  const Verdict* find_verdict(const std::string& name) const {
    for (const auto& v : verdicts) {
      if (v.name == name) return &v;
    }
    return nullptr;
  }
};

/// Fixed, locale-independent rendering so CSV output is byte-stable.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string summary_csv(const Report& r) {
  std::ostringstream os;
  os << "name,mean,var,half_width_95,n_paths,n_failed,seed\n";
  for (const auto& e : r.estimates) {
    os << e.name << ',' << format_number(e.mean) << ',' << format_number(e.variance) << ','
       << format_number(e.half_width_95) << ',' << e.n_paths << ',' << e.n_failed << ',' << e.base_seed << '\n';
  }
  os << "\nname,slope,intercept,r2,n_points\n";
  for (const auto& f : r.rates) {
    os << f.name << ',' << format_number(f.slope) << ',' << format_number(f.intercept) << ','
       << format_number(f.r_squared) << ',' << f.points.size() << '\n';
  }
  os << "\nname,value\n";
  for (const auto& v : r.values) os << v.name << ',' << format_number(v.value) << '\n';
  os << "\nverdict,status\n";
  for (const auto& v : r.verdicts) os << v.name << ',' << to_string(v.status) << '\n';
  return os.str();
}

inline json report_json(const Report& r) {
  json j;
  j["experiment"] = r.experiment;
  j["config"] = r.config;
  j["estimates"] = json::array();
  for (const auto& e : r.estimates) {
    j["estimates"].push_back({{"name", e.name}, {"mean", e.mean}, {"variance", e.variance},
                              {"half_width_95", e.half_width_95}, {"n_paths", e.n_paths},
                              {"n_failed", e.n_failed}, {"seed", e.base_seed}});
  }
  j["rates"] = json::array();
  for (const auto& f : r.rates) {
    json pts = json::array();
    for (const auto& [a, v] : f.points) pts.push_back({a, v});
    j["rates"].push_back({{"name", f.name}, {"slope", f.slope}, {"intercept", f.intercept},
                          {"r2", f.r_squared}, {"points", pts}});
  }
  j["values"] = json::object();
  for (const auto& v : r.values) j["values"][v.name] = v.value;
  j["verdicts"] = json::array();
  for (const auto& v : r.verdicts) {
    j["verdicts"].push_back({{"name", v.name}, {"status", to_string(v.status)}, {"detail", v.detail}});
  }
  j["all_pass"] = r.all_pass();
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

/// Writes report.json, summary.csv and, when requested, snapshots/*.csv
/// (columns x,u) into `dir`.
inline void emit_report(const Report& r, const std::filesystem::path& dir, bool write_snapshots = false) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  auto write = [](const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + p.string());
  };
  write(dir / "report.json", report_json(r).dump(2) + "\n");
  write(dir / "summary.csv", summary_csv(r));
  if (write_snapshots && !r.snapshots.empty()) {
    fs::create_directories(dir / "snapshots", ec);
    if (ec) throw std::runtime_error("cannot create " + (dir / "snapshots").string());
    for (const auto& s : r.snapshots) {
      std::ostringstream os;
      os << "x,u\n";
      for (std::size_t j = 0; j < s.values.size(); ++j) {
        os << format_number((static_cast<double>(j) + 0.5) * s.dx) << ',' << format_number(s.values[j]) << '\n';
      }
      write(dir / "snapshots" / (s.name + ".csv"), os.str());
    }
  }
}

}  // namespace levyvisc
