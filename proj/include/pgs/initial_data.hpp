#pragma once

// Initial data builders shared by the experiment runner and the benchmark
// suites: constant states, Gaussian bumps, the constant fixed point of the
// rescaled flow and its standard perturbations.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pgs/cutoff.hpp"
#include "pgs/grid.hpp"
#include "pgs/nonlinearity.hpp"
#include "pgs/quadrature.hpp"
#include "pgs/selfsimilar.hpp"

namespace pgs {

inline Field constant_field(const Grid& grid, const std::vector<double>& amplitudes) {
  Field f(grid, static_cast<int>(amplitudes.size()));
  for (int c = 0; c < f.components(); ++c)
    for (std::int64_t node = 0; node < grid.total_nodes(); ++node)
      f.at(c, node) = amplitudes[static_cast<std::size_t>(c)];
  return f;
}

inline Field gaussian_bump_field(const Grid& grid, const std::vector<double>& amplitudes, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian bump: width must be positive");
  Field f(grid, static_cast<int>(amplitudes.size()));
  for (std::int64_t node = 0; node < grid.total_nodes(); ++node) {
    const double shape = std::exp(-grid.radius_sq(node) / (width * width));
    for (int c = 0; c < f.components(); ++c) f.at(c, node) = amplitudes[static_cast<std::size_t>(c)] * shape;
  }
  return f;
}

inline Field kappa_field(const Grid& grid, const SystemParams& params) {
  return constant_field(grid, kappa_constant(params));
}

// kappa plus a smooth even perturbation. With remove_mean the perturbation is
// orthogonal to constants in L^2_rho, so it does not excite the amplitude
// instability of the constant state and the run stays near kappa.
inline Field perturbed_kappa_field(const Grid& grid, const SystemParams& params, double epsilon,
                                   bool remove_mean) {
  Field f = kappa_field(grid, params);
  const auto kappa = kappa_constant(params);
  const double sigma_sq = 2.25;  // gentle profile, resolved already on coarse grids
  const auto bump = [&](std::int64_t node) {
    return std::exp(-grid.radius_sq(node) / (2.0 * sigma_sq));
  };
  double mean = 0.0;
  if (remove_mean) {
    const QuadratureRegion region(grid, std::nullopt);
    const double mass = integrate_rho(region, [&](std::int64_t) { return 1.0; });
    mean = integrate_rho(region, bump) / mass;
  }
  for (std::int64_t node = 0; node < grid.total_nodes(); ++node) {
    const double shape = bump(node) - mean;
    for (int c = 0; c < f.components(); ++c)
      f.at(c, node) += epsilon * kappa[static_cast<std::size_t>(c)] * shape;
  }
  return f;
}

// Sign-changing state at the kappa scale, odd in the first coordinate. The
// flow preserves the odd symmetry, so the zero set stays pinned on the grid
// line y_0 = 0 and the kink of the aggregate sits exactly on nodes.
inline Field signflip_kappa_field(const Grid& grid, const SystemParams& params) {
  Field f(grid, params.components);
  const auto kappa = kappa_constant(params);
  for (std::int64_t node = 0; node < grid.total_nodes(); ++node) {
    const auto y = grid.point(node);
    const double shape = 1.5 * (y[0] / 2.0) * std::exp(-grid.radius_sq(node) / 8.0);
    for (int c = 0; c < f.components(); ++c) f.at(c, node) = kappa[static_cast<std::size_t>(c)] * shape;
  }
  return f;
}

}  // namespace pgs
