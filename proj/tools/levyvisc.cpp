// Command-line front end: one subcommand per experiment driver.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "levyvisc/levyvisc.hpp"

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  unsigned threads = 1;
  bool snapshots = false;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
  auto* opt = sub->add_option("--config", c.config, "experiment configuration (JSON)");
  if (config_required) opt->required();
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--seed", c.seed, "override mc.base_seed");
  sub->add_option("--paths", c.paths, "override mc.n_paths")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 32));
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
  sub->add_flag("--snapshots", c.snapshots, "write snapshots/*.csv for path 0");
}

int run(const std::string& name, const Common& c) {
  using namespace levyvisc;
  try {
    const json doc = c.config.empty() ? json::object() : read_json_file(c.config);
    const RunConfig cfg = load_config(doc, c.seed, c.paths);
    if (!cfg.experiment.driver.empty() && name != "validate" && cfg.experiment.driver != name) {
      throw ConfigError("config is for '" + cfg.experiment.driver + "', not '" + name + "'");
    }
    RunOptions opts;
    opts.threads = c.threads;
    opts.snapshots = c.snapshots;
    const Report report = run_experiment(name, cfg, opts);
    emit_report(report, c.out, c.snapshots);
    for (const auto& v : report.verdicts) {
      std::cout << to_string(v.status) << "  " << v.name << "  " << v.detail << "\n";
    }
    if (!report.all_pass()) {
      for (const auto& f : report.failing()) std::cerr << "failed: " << f << "\n";
      return 1;
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const EstimationImpossible& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vanishing-viscosity experiments for Levy-driven degenerate balance laws"};
  app.require_subcommand(1);
  const std::pair<const char*, const char*> commands[] = {
      {"validate", "check the configured problem against the standing hypotheses"},
      {"oracle", "closed-form solver cross-checks"},
      {"bv", "expected total variation against TV(u0)"},
      {"rate", "error against a reference run over an eps sweep"},
      {"cdep", "continuous dependence on one coefficient"},
      {"fracbv", "shift modulus with x-dependent noise"},
      {"entropy", "entropy residual in expectation"},
  };
  Common common;
  std::string chosen;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    const std::string n = name;
    add_common(sub, common, n != "oracle");
    sub->callback([&chosen, n] { chosen = n; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? 0 : (code == 0 ? 0 : 2);
  }
  return run(chosen, common);
}
