#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace levyvisc {

using json = nlohmann::json;

/// Malformed or unsupported configuration. Maps to CLI exit status 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace config_detail {

inline void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

inline void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  expect_object(j, where);
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

inline double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

inline double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

inline std::vector<double> numbers(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return {};
  const auto& a = j.at(key);
  if (!a.is_array()) throw ConfigError(where + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline std::string string_or(const json& j, const char* key, const std::string& fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return j.at(key).get<std::string>();
}

}  // namespace config_detail

struct EntropyPairConfig {
  double xi = 0.1;
  double center = 0.5;      // Kruzkov constant k
  double psi_center = 0.5;  // spatial centre of the test function
  double psi_radius = 0.2;
};

struct ExperimentConfig {
  std::string driver;
  std::vector<double> epsilons;
  std::string channel;
  std::vector<double> h;
  std::vector<double> deltas;
  std::optional<std::pair<double, double>> window;  // K_R in x coordinates
  std::optional<double> weight_center;              // Phi(x) = exp(-|x - c|)
  std::size_t reference_refine = 4;
  double reference_epsilon_factor = 0.1;
  std::vector<EntropyPairConfig> pairs;
  std::vector<std::size_t> calibration_cells;
  std::map<std::string, double> thresholds;

  double threshold(const std::string& key, double fallback) const {
    auto it = thresholds.find(key);
    return it == thresholds.end() ? fallback : it->second;
  }
};

/// Parsed experiment configuration. `raw` keeps the document (after CLI
/// overrides) for the report echo.
struct RunConfig {
  json raw;
  json problem;
  std::optional<json> control;
  std::size_t cells = 0;
  double domain_length = 0.0;
  double horizon = 0.0;
  double safety = 0.5;
  std::size_t outputs = 10;
  std::size_t n_paths = 0;
  std::uint64_t base_seed = 0;
  ExperimentConfig experiment;
};

inline RunConfig parse_config(const json& doc) {
  using namespace config_detail;
  allow_keys(doc, {"experiment", "problem", "control", "grid", "time", "mc"}, "config");
  RunConfig cfg;
  cfg.raw = doc;

  const json exp = doc.value("experiment", json::object());
  allow_keys(exp, {"driver", "epsilons", "channel", "h", "deltas", "window", "weight", "reference", "pairs",
                   "calibration_cells", "thresholds"},
             "experiment");
  auto& e = cfg.experiment;
  e.driver = string_or(exp, "driver", "", "experiment");
  e.epsilons = numbers(exp, "epsilons", "experiment");
  if (exp.contains("channel")) {
    const auto& c = exp.at("channel");
    if (c.is_array()) {
      if (c.size() != 1) throw ConfigError("experiment.channel: select exactly one perturbation channel");
      e.channel = c.at(0).get<std::string>();
    } else if (c.is_string()) {
      e.channel = c.get<std::string>();
    } else {
      throw ConfigError("experiment.channel: expected a string");
    }
  }
  e.h = numbers(exp, "h", "experiment");
  e.deltas = numbers(exp, "deltas", "experiment");
  if (exp.contains("window")) {
    const auto w = numbers(exp, "window", "experiment");
    if (w.size() != 2 || !(w[1] > w[0])) throw ConfigError("experiment.window: expected [lo, hi] with lo < hi");
    e.window = std::make_pair(w[0], w[1]);
  }
  if (exp.contains("weight")) {
    const auto& w = exp.at("weight");
    allow_keys(w, {"type", "center"}, "experiment.weight");
    if (string_or(w, "type", "exponential", "experiment.weight") != "exponential") {
      throw ConfigError("experiment.weight.type: only 'exponential' is available");
    }
    if (w.contains("center")) e.weight_center = number(w, "center", "experiment.weight");
  }
  if (exp.contains("reference")) {
    const auto& r = exp.at("reference");
    allow_keys(r, {"refine", "epsilon_factor"}, "experiment.reference");
    const double refine = number_or(r, "refine", 4.0, "experiment.reference");
    if (refine < 1.0 || refine != static_cast<double>(static_cast<std::size_t>(refine))) {
      throw ConfigError("experiment.reference.refine: expected a positive integer");
    }
    e.reference_refine = static_cast<std::size_t>(refine);
    e.reference_epsilon_factor = number_or(r, "epsilon_factor", 0.1, "experiment.reference");
  }
  if (exp.contains("pairs")) {
    if (!exp.at("pairs").is_array()) throw ConfigError("experiment.pairs: expected an array");
    for (const auto& p : exp.at("pairs")) {
      allow_keys(p, {"xi", "center", "psi_center", "psi_radius"}, "experiment.pairs[]");
      EntropyPairConfig pc;
      pc.xi = number(p, "xi", "experiment.pairs[]");
      pc.center = number(p, "center", "experiment.pairs[]");
      pc.psi_center = number(p, "psi_center", "experiment.pairs[]");
      pc.psi_radius = number(p, "psi_radius", "experiment.pairs[]");
      e.pairs.push_back(pc);
    }
  }
  for (double c : numbers(exp, "calibration_cells", "experiment")) {
    if (c < 4.0) throw ConfigError("experiment.calibration_cells: need at least 4 cells");
    e.calibration_cells.push_back(static_cast<std::size_t>(c));
  }
  if (exp.contains("thresholds")) {
    const auto& t = exp.at("thresholds");
    expect_object(t, "experiment.thresholds");
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (!it.value().is_number()) throw ConfigError("experiment.thresholds." + it.key() + ": expected a number");
      e.thresholds[it.key()] = it.value().get<double>();
    }
  }

  if (doc.contains("problem")) cfg.problem = doc.at("problem");
  if (doc.contains("control")) cfg.control = doc.at("control");

  const json grid = doc.value("grid", json::object());
  allow_keys(grid, {"cells", "domain_length"}, "grid");
  const double cells = number_or(grid, "cells", 200.0, "grid");
  if (cells < 3.0 || cells != static_cast<double>(static_cast<std::size_t>(cells))) {
    throw ConfigError("grid.cells: expected an integer >= 3");
  }
  cfg.cells = static_cast<std::size_t>(cells);
  cfg.domain_length = number_or(grid, "domain_length", 2.0, "grid");
  if (!(cfg.domain_length > 0.0)) throw ConfigError("grid.domain_length: must be positive");

  const json time = doc.value("time", json::object());
  allow_keys(time, {"T", "safety", "outputs"}, "time");
  cfg.horizon = number_or(time, "T", 0.5, "time");
  cfg.safety = number_or(time, "safety", 0.5, "time");
  const double outputs = number_or(time, "outputs", 10.0, "time");
  if (!(cfg.horizon > 0.0)) throw ConfigError("time.T: must be positive");
  if (!(cfg.safety > 0.0) || cfg.safety > 1.0) throw ConfigError("time.safety: must lie in (0, 1]");
  if (outputs < 1.0) throw ConfigError("time.outputs: need at least one output interval");
  cfg.outputs = static_cast<std::size_t>(outputs);

  const json mc = doc.value("mc", json::object());
  allow_keys(mc, {"n_paths", "base_seed"}, "mc");
  const double paths = number_or(mc, "n_paths", 64.0, "mc");
  if (paths < 2.0) throw ConfigError("mc.n_paths: need at least two paths");
  cfg.n_paths = static_cast<std::size_t>(paths);
  cfg.base_seed = static_cast<std::uint64_t>(number_or(mc, "base_seed", 1.0, "mc"));
  return cfg;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
}

/// Applies --seed / --paths overrides to the document before parsing, so the
/// echoed config re-runs to the same result.
inline RunConfig load_config(const json& doc, std::optional<std::uint64_t> seed = std::nullopt,
                             std::optional<std::size_t> paths = std::nullopt) {
  json d = doc;
  if (seed) d["mc"]["base_seed"] = *seed;
  if (paths) d["mc"]["n_paths"] = *paths;
  return parse_config(d);
}

}  // namespace levyvisc
