#pragma once

// Gaussian-weighted quadrature and norms on truncated grids. Node sums use
// tensor trapezoidal weights; restriction to a centered ball B_R keeps the
// trapezoidal endpoint convention along each included axis range in 1D and a
// node-inclusion mask in 2D. All reductions are deterministic pairwise sums.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pgs/grid.hpp"
#include "pgs/numerics.hpp"

namespace pgs {

inline double gaussian_weight(std::span<const double> y) {
  double r2 = 0.0;
  for (double v : y) {
    if (!std::isfinite(v)) throw std::domain_error("gaussian_weight: non-finite point");
    r2 += v * v;
  }
  return std::exp(-r2 / 4.0);
}

inline double gaussian_weight(const Grid& grid, std::int64_t node) {
  return std::exp(-grid.radius_sq(node) / 4.0);
}

// Quadrature weights for the whole grid or for a centered ball of radius R.
class QuadratureRegion {
 public:
  QuadratureRegion(const Grid& grid, std::optional<double> ball_radius)
      : grid_(grid), radius_(ball_radius) {
    if (radius_) {
      if (!(*radius_ > 0.0)) throw std::invalid_argument("quadrature: ball radius must be positive");
      if (*radius_ > grid.half_extent() * (1.0 + 1e-12))
        throw TruncationError("quadrature: ball radius exceeds the grid half extent");
      const double reach = *radius_ * (1.0 + 1e-12);
      k_lo_ = grid.axis_points();
      k_hi_ = -1;
      for (int k = 0; k < grid.axis_points(); ++k) {
        if (std::fabs(grid.coord(k)) <= reach) {
          k_lo_ = std::min(k_lo_, k);
          k_hi_ = std::max(k_hi_, k);
        }
      }
      if (k_hi_ < k_lo_) throw TruncationError("quadrature: ball contains no grid nodes");
    }
  }

  const Grid& grid() const { return grid_; }
  bool whole_grid() const { return !radius_.has_value(); }

  bool contains(std::int64_t node) const {
    if (!radius_) return true;
    return grid_.radius_sq(node) <= (*radius_) * (*radius_) * (1.0 + 1e-12);
  }

  double weight(std::int64_t node) const {
    if (!radius_) return grid_.quadrature_weight(node);
    if (!contains(node)) return 0.0;
    if (grid_.space_dim() == 1) {
      const auto ij = grid_.unflatten(node);
      const double h = grid_.spacing();
      return (ij[0] == k_lo_ || ij[0] == k_hi_) ? 0.5 * h : h;
    }
    // 2D: node-inclusion mask with full tensor weights; the staircase error
    // is absorbed by the tolerances of the monitored quantities.
    return grid_.quadrature_weight(node);
  }

 private:
  Grid grid_;
  std::optional<double> radius_;
  int k_lo_ = 0, k_hi_ = 0;
};

// Sum of fn(node) * rho(node) * w(node) over the region.
template <class Fn>
double integrate_rho(const QuadratureRegion& region, const Fn& fn) {
  const auto& g = region.grid();
  return pairwise_accumulate(0, g.total_nodes(), [&](std::int64_t node) {
    const double w = region.weight(node);
    return w == 0.0 ? 0.0 : fn(node) * gaussian_weight(g, node) * w;
  });
}

template <class Fn>
double integrate_rho(const Grid& grid, const Fn& fn) {
  return integrate_rho(QuadratureRegion(grid, std::nullopt), fn);
}

// (integral of |f|^q rho)^{1/q}; |f| is the euclidean norm across components.
inline double weighted_lebesgue_norm(const Field& f, double q,
                                     std::optional<double> region_radius = std::nullopt) {
  if (!(q >= 1.0)) throw std::invalid_argument("weighted_lebesgue_norm: q must be >= 1");
  if (!f.all_finite()) throw std::domain_error("weighted_lebesgue_norm: non-finite field");
  const QuadratureRegion region(f.grid(), region_radius);
  const double integral =
      integrate_rho(region, [&](std::int64_t node) { return std::pow(f.node_norm(node), q); });
  return std::pow(integral, 1.0 / q);
}

// Staggered (face-based) gradient energy: sum over cell faces of
// rho(face midpoint) |D+ f|^2, the quadratic form matching the divergence
// form of the rescaled operator. Faces to the zero ghost layer are included
// on the whole grid so the discrete energy pairs exactly with the flow.
inline double face_gradient_energy(const Field& f, std::optional<double> region_radius = std::nullopt) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  const int n = g.axis_points();
  const bool whole = !region_radius.has_value();
  const double r2max = region_radius ? (*region_radius) * (*region_radius) * (1.0 + 1e-12) : 0.0;
  const QuadratureRegion region(g, region_radius);

  const auto x_face = [&](std::int64_t face_index) {
    // faces between (i-1, j) and (i, j) for i in [0, n]; ghost value 0 outside
    const std::int64_t per_row = n + 1;
    const int i = static_cast<int>(face_index % per_row);
    const int j = static_cast<int>(face_index / per_row);
    if (!whole && (i == 0 || i == n)) return 0.0;  // region faces need both nodes inside
    const double xm = g.coord(i) - 0.5 * h;  // midpoint x of the face
    const double ym = g.space_dim() == 2 ? g.coord(j) : 0.0;
    if (!whole) {
      if (xm * xm + ym * ym > r2max) return 0.0;
      if (!region.contains(g.flat(i - 1, j)) || !region.contains(g.flat(i, j))) return 0.0;
    }
    const double rho = std::exp(-(xm * xm + ym * ym) / 4.0);
    double sum = 0.0;
    for (int c = 0; c < f.components(); ++c) {
      const double left = i > 0 ? f.at(c, g.flat(i - 1, j)) : 0.0;
      const double right = i < n ? f.at(c, g.flat(i, j)) : 0.0;
      const double d = (right - left) / h;
      sum += d * d;
    }
    return sum * rho;
  };
  const std::int64_t rows = g.space_dim() == 2 ? n : 1;
  double total = pairwise_accumulate(0, (static_cast<std::int64_t>(n) + 1) * rows, x_face);

  if (g.space_dim() == 2) {
    const auto y_face = [&](std::int64_t face_index) {
      const std::int64_t per_col = n + 1;
      const int j = static_cast<int>(face_index % per_col);
      const int i = static_cast<int>(face_index / per_col);
      if (!whole && (j == 0 || j == n)) return 0.0;
      const double xm = g.coord(i);
      const double ym = g.coord(j) - 0.5 * h;
      if (!whole) {
        if (xm * xm + ym * ym > r2max) return 0.0;
        if (!region.contains(g.flat(i, j - 1)) || !region.contains(g.flat(i, j))) return 0.0;
      }
      const double rho = std::exp(-(xm * xm + ym * ym) / 4.0);
      double sum = 0.0;
      for (int c = 0; c < f.components(); ++c) {
        const double lower = j > 0 ? f.at(c, g.flat(i, j - 1)) : 0.0;
        const double upper = j < n ? f.at(c, g.flat(i, j)) : 0.0;
        const double d = (upper - lower) / h;
        sum += d * d;
      }
      return sum * rho;
    };
    total += pairwise_accumulate(0, (static_cast<std::int64_t>(n) + 1) * n, y_face);
  }
  const double cell = g.space_dim() == 2 ? h * h : h;
  return total * cell;
}

// (integral of (|grad f|^2 + beta |f|^2) rho)^{1/2} with the staggered gradient.
inline double weighted_sobolev_norm(const Field& f, double beta_exp,
                                    std::optional<double> region_radius = std::nullopt) {
  if (!f.all_finite()) throw std::domain_error("weighted_sobolev_norm: non-finite field");
  const QuadratureRegion region(f.grid(), region_radius);
  const double mass = integrate_rho(region, [&](std::int64_t node) {
    const double v = f.node_norm(node);
    return v * v;
  });
  return std::sqrt(face_gradient_energy(f, region_radius) + beta_exp * mass);
}

}  // namespace pgs
