#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "levyvisc/noise/noise_path.hpp"
#include "levyvisc/solver/scheme.hpp"

namespace levyvisc {

/// Monte Carlo summary over the successful paths. `n_paths` counts the paths
/// that entered the statistics; blown-up paths are counted in `n_failed`.
struct EstimateSummary {
  std::string name;
  double mean = 0.0;
  double variance = 0.0;
  double half_width_95 = 0.0;
  std::size_t n_paths = 0;
  std::size_t n_failed = 0;
  std::uint64_t base_seed = 0;
};

class EstimationImpossible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PathContext {
  std::uint64_t base_seed;
  std::uint64_t path_index;

  RngStream stream(std::uint32_t substream = RngStream::kUser) const {
    return RngStream(base_seed, path_index, substream);
  }
};

/// Runs fn(0..n-1) on `threads` workers. Results land in index order, so the
/// outcome does not depend on the worker count.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline EstimateSummary summarize(std::string name, const std::vector<double>& samples, std::size_t n_failed,
                                 std::uint64_t base_seed) {
  EstimateSummary s;
  s.name = std::move(name);
  s.n_paths = samples.size();
  s.n_failed = n_failed;
  s.base_seed = base_seed;
  if (samples.empty()) return s;
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(samples.size());
  double ss = 0.0;
  for (double v : samples) ss += (v - s.mean) * (v - s.mean);
  s.variance = samples.size() > 1 ? ss / static_cast<double>(samples.size() - 1) : 0.0;
  s.half_width_95 = 1.96 * std::sqrt(s.variance / static_cast<double>(samples.size()));
  return s;
}

/// Vector-valued Monte Carlo: each path returns one value per name. A path
/// that throws PathBlowUp is excluded and counted as failed; any other
/// exception propagates.
template <class Fn>
std::vector<EstimateSummary> monte_carlo(Fn&& per_path, const std::vector<std::string>& names, std::size_t n_paths,
                                         std::uint64_t base_seed, unsigned threads = 1) {
  if (n_paths < 2) throw std::invalid_argument("monte_carlo: need at least two paths");
  std::vector<std::optional<std::vector<double>>> results(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    try {
      auto v = per_path(PathContext{base_seed, i});
      if (v.size() != names.size()) throw std::logic_error("monte_carlo: estimator returned wrong arity");
      results[i] = std::move(v);
    } catch (const PathBlowUp&) {
      results[i].reset();
    }
  });
  std::size_t failed = 0;
  std::vector<std::vector<double>> columns(names.size());
  for (const auto& r : results) {
    if (!r) {
      ++failed;
      continue;
    }
    for (std::size_t k = 0; k < names.size(); ++k) columns[k].push_back((*r)[k]);
  }
  if (failed == n_paths) throw EstimationImpossible("monte_carlo: every path failed");
  std::vector<EstimateSummary> out;
  for (std::size_t k = 0; k < names.size(); ++k) out.push_back(summarize(names[k], columns[k], failed, base_seed));
  return out;
}

/// Scalar convenience wrapper.
template <class Fn>
EstimateSummary monte_carlo_scalar(Fn&& per_path, std::size_t n_paths, std::uint64_t base_seed, unsigned threads = 1,
                                   std::string name = "estimate") {
  auto wrapped = [&](const PathContext& ctx) { return std::vector<double>{per_path(ctx)}; };
  return monte_carlo(wrapped, {std::move(name)}, n_paths, base_seed, threads).front();
}

}  // namespace levyvisc
