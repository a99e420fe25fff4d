#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "levyvisc/model/coefficient.hpp"

namespace levyvisc {

struct LevyAtom {
  double z;
  double weight;
};

/// Finite-activity Levy measure m(dz) = sum_k weight_k delta_{z_k}.
class LevyMeasure {
 public:
  LevyMeasure() = default;
  explicit LevyMeasure(std::vector<LevyAtom> atoms) : atoms_(std::move(atoms)) {
    for (const auto& a : atoms_) {
      if (a.z == 0.0 || !std::isfinite(a.z)) throw std::invalid_argument("LevyMeasure: atom at z = 0");
      if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
        throw std::invalid_argument("LevyMeasure: atom weights must be positive");
      }
    }
  }

  const std::vector<LevyAtom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }

  double total_rate() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
  }

  bool operator==(const LevyMeasure& o) const {
    if (atoms_.size() != o.atoms_.size()) return false;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (atoms_[i].z != o.atoms_[i].z || atoms_[i].weight != o.atoms_[i].weight) return false;
    }
    return true;
  }

 private:
  std::vector<LevyAtom> atoms_;
};

/// int (1 ^ |z|^2) m(dz).
inline double levy_integrability(const LevyMeasure& m) {
  double s = 0.0;
  for (const auto& a : m.atoms()) s += a.weight * std::min(1.0, a.z * a.z);
  return s;
}

/// int eta(x, u; z) m(dz), the drift removed between jumps.
inline double compensator_integral(const JumpCoefficient& eta, const LevyMeasure& m, double x, double u) {
  double s = 0.0;
  for (const auto& a : m.atoms()) s += eta(x, u, a.z) * a.weight;
  return s;
}

}  // namespace levyvisc
