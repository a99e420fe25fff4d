#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "levyvisc/noise/levy_measure.hpp"

namespace levyvisc {

/// Deterministic random stream addressed by (base_seed, path_index, substream).
/// Substream 0 drives the Brownian increments, substream 1 the jumps, so
/// switching jumps on or off never perturbs the Brownian draws.
class RngStream {
 public:
  enum Substream : std::uint32_t { kBrownian = 0, kJumps = 1, kUser = 2 };

  RngStream(std::uint64_t base_seed, std::uint64_t path_index, std::uint32_t substream = kUser) {
    std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                      static_cast<std::uint32_t>(path_index), static_cast<std::uint32_t>(path_index >> 32),
                      substream, 0x5eedu};
    engine_.seed(seq);
  }

  std::mt19937_64& engine() { return engine_; }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

 private:
  std::mt19937_64 engine_;
};

struct Jump {
  double t;                // jump time in (0, T]
  double z;                // mark, one of the measure's atom locations
  std::size_t step;        // index of the time step (t_step, t_step+1] holding t
};

/// n_steps independent N(0, dt) draws.
inline std::vector<double> sample_brownian(RngStream& stream, std::size_t n_steps, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_brownian: dt must be positive");
  std::vector<double> out(n_steps);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  for (auto& v : out) v = normal(stream.engine());
  return out;
}

/// Jumps of a Poisson random measure with intensity m(dz) dt on (0, T],
/// sorted by time. Step indices are left at 0; see make_noise_path.
inline std::vector<Jump> sample_jumps(RngStream& stream, const LevyMeasure& m, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("sample_jumps: horizon must be positive");
  std::vector<Jump> out;
  if (m.empty()) return out;
  const double rate = m.total_rate();
  std::poisson_distribution<long> count_dist(rate * horizon);
  const long count = count_dist(stream.engine());
  std::vector<double> weights;
  for (const auto& a : m.atoms()) weights.push_back(a.weight);
  std::discrete_distribution<std::size_t> mark_dist(weights.begin(), weights.end());
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    const double t = horizon * (1.0 - stream.uniform());  // (0, T]
    const double z = m.atoms()[mark_dist(stream.engine())].z;
    out.push_back({t, z, 0});
  }
  std::sort(out.begin(), out.end(), [](const Jump& a, const Jump& b) { return a.t < b.t; });
  return out;
}

/// One realization of (W, N) on a uniform time grid, shared by every
/// equation that consumes it.
struct NoisePath {
  double dt = 0.0;
  std::vector<double> brownian_increments;
  std::vector<Jump> jumps;
  std::uint64_t base_seed = 0;
  std::uint64_t path_index = 0;

  std::size_t n_steps() const { return brownian_increments.size(); }
  double horizon() const { return dt * static_cast<double>(n_steps()); }

  /// Jumps whose step index equals `step`, in time order.
  std::span<const Jump> jumps_in_step(std::size_t step) const {
    auto lo = std::lower_bound(jumps.begin(), jumps.end(), step,
                               [](const Jump& j, std::size_t s) { return j.step < s; });
    auto hi = std::upper_bound(lo, jumps.end(), step, [](std::size_t s, const Jump& j) { return s < j.step; });
    return {lo, hi};
  }

  /// Brownian path value W(t_n).
  double brownian_at(std::size_t n) const {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) w += brownian_increments[i];
    return w;
  }

  std::size_t jump_count() const { return jumps.size(); }
};

inline NoisePath make_noise_path(std::uint64_t base_seed, std::uint64_t path_index, double dt, std::size_t n_steps,
                                 const LevyMeasure& m) {
  if (!(dt > 0.0)) throw std::invalid_argument("make_noise_path: dt must be positive");
  if (n_steps == 0) throw std::invalid_argument("make_noise_path: need at least one step");
  NoisePath path;
  path.dt = dt;
  path.base_seed = base_seed;
  path.path_index = path_index;
  RngStream bm(base_seed, path_index, RngStream::kBrownian);
  path.brownian_increments = sample_brownian(bm, n_steps, dt);
  RngStream js(base_seed, path_index, RngStream::kJumps);
  const double horizon = dt * static_cast<double>(n_steps);
  path.jumps = sample_jumps(js, m, horizon);
  for (auto& j : path.jumps) {
    const double pos = std::ceil(j.t / dt) - 1.0;
    j.step = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(n_steps - 1)));
  }
  return path;
}

/// Coarser view of the same realization: `factor` consecutive Brownian
/// increments are summed and every jump is kept, reassigned to its coarse step.
inline NoisePath coarsen(const NoisePath& fine, std::size_t factor) {
  if (factor == 0 || fine.n_steps() % factor != 0) {
    throw std::invalid_argument("coarsen: factor must divide the number of steps");
  }
  if (factor == 1) return fine;
  NoisePath out;
  out.dt = fine.dt * static_cast<double>(factor);
  out.base_seed = fine.base_seed;
  out.path_index = fine.path_index;
  out.brownian_increments.assign(fine.n_steps() / factor, 0.0);
  for (std::size_t i = 0; i < fine.n_steps(); ++i) out.brownian_increments[i / factor] += fine.brownian_increments[i];
  out.jumps = fine.jumps;
  for (auto& j : out.jumps) j.step /= factor;
  return out;
}

}  // namespace levyvisc
