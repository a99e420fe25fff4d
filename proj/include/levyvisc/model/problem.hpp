#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "levyvisc/model/coefficient.hpp"
#include "levyvisc/noise/levy_measure.hpp"

namespace levyvisc {

/// Data (u0, f, A, sigma, eta, m) of one balance law
///   du = d_x f(u) dt + d_xx A(u) dt + sigma(x, u) dW + int eta(x, u; z) N~(dz, dt)
/// on the periodic interval [0, domain_length) split into `cells` cells.
struct ProblemSpec {
  std::vector<double> u0;
  CoefficientFn flux = CoefficientFn::zero();
  CoefficientFn diffusion = CoefficientFn::zero();
  CoefficientFn sigma = CoefficientFn::zero();
  JumpCoefficient eta = JumpCoefficient::zero();
  LevyMeasure measure;
  double domain_length = 1.0;

  std::size_t cells() const { return u0.size(); }
  double dx() const { return domain_length / static_cast<double>(u0.size()); }
  double cell_center(std::size_t j) const { return (static_cast<double>(j) + 0.5) * dx(); }

  bool noise_is_x_dependent() const { return sigma.x_dependent || eta.x_dependent; }
  bool is_deterministic() const { return sigma.is_zero() && (eta.is_zero() || measure.empty()); }
};

/// Samples u0 at the cell centres of a grid with `cells` cells on [0, length).
template <class F>
std::vector<double> sample_cells(F&& profile, std::size_t cells, double length) {
  if (cells == 0 || !(length > 0.0)) throw std::invalid_argument("sample_cells: empty grid");
  std::vector<double> out(cells);
  const double dx = length / static_cast<double>(cells);
  for (std::size_t j = 0; j < cells; ++j) out[j] = profile((static_cast<double>(j) + 0.5) * dx);
  return out;
}

}  // namespace levyvisc
