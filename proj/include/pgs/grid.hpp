#pragma once

// Truncated uniform grids on [-L, L]^N for N in {1, 2} and the multi-component
// grid functions living on them. Grids and fields are immutable in spirit:
// operations return new fields. The node count per axis is odd so the origin
// is always a node.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pgs/numerics.hpp"

namespace pgs {

class Grid {
 public:
  Grid(int space_dim, double half_extent, int points_per_axis)
      : space_dim_(space_dim), half_extent_(half_extent), points_per_axis_(points_per_axis) {
    if (space_dim_ != 1 && space_dim_ != 2)
      throw std::invalid_argument("grid: space dimension must be 1 or 2");
    if (!(half_extent_ > 0.0) || !std::isfinite(half_extent_))
      throw std::invalid_argument("grid: half extent must be positive and finite");
    if (points_per_axis_ < 17 || points_per_axis_ % 2 == 0)
      throw std::invalid_argument("grid: points per axis must be odd and >= 17");
    spacing_ = 2.0 * half_extent_ / (points_per_axis_ - 1);
  }

  int space_dim() const { return space_dim_; }
  double half_extent() const { return half_extent_; }
  int axis_points() const { return points_per_axis_; }
  double spacing() const { return spacing_; }
  std::int64_t total_nodes() const {
    std::int64_t n = points_per_axis_;
    return space_dim_ == 1 ? n : n * n;
  }

  double coord(int k) const { return -half_extent_ + spacing_ * k; }

  // Flat index layout: x index fastest, flat = i + n*j.
  std::int64_t flat(int i, int j = 0) const { return i + static_cast<std::int64_t>(points_per_axis_) * j; }
  std::array<int, 2> unflatten(std::int64_t node) const {
    const int i = static_cast<int>(node % points_per_axis_);
    const int j = static_cast<int>(node / points_per_axis_);
    return {i, j};
  }
  std::array<double, 2> point(std::int64_t node) const {
    const auto ij = unflatten(node);
    return {coord(ij[0]), space_dim_ == 2 ? coord(ij[1]) : 0.0};
  }
  double radius_sq(std::int64_t node) const {
    const auto y = point(node);
    return y[0] * y[0] + y[1] * y[1];
  }

  // Distance (in layers) from the nearest axis boundary.
  int boundary_distance(std::int64_t node) const {
    const auto ij = unflatten(node);
    int d = std::min(ij[0], points_per_axis_ - 1 - ij[0]);
    if (space_dim_ == 2) d = std::min({d, ij[1], points_per_axis_ - 1 - ij[1]});
    return d;
  }
  bool is_interior(std::int64_t node, int layers = 1) const { return boundary_distance(node) >= layers; }

  // Tensor-product trapezoidal node weight (h per axis, halved at the ends).
  double quadrature_weight(std::int64_t node) const {
    const auto ij = unflatten(node);
    double w = axis_weight(ij[0]);
    if (space_dim_ == 2) w *= axis_weight(ij[1]);
    return w;
  }

  bool same_layout(const Grid& other) const {
    return space_dim_ == other.space_dim_ && points_per_axis_ == other.points_per_axis_ &&
           half_extent_ == other.half_extent_;
  }

 private:
  double axis_weight(int k) const {
    return (k == 0 || k == points_per_axis_ - 1) ? 0.5 * spacing_ : spacing_;
  }

  int space_dim_;
  double half_extent_;
  int points_per_axis_;
  double spacing_;
};

// M-component grid function. Values are stored component-major, nodes in flat
// (x fastest) order within each component.
class Field {
 public:
  Field(const Grid& grid, int components, double fill = 0.0)
      : grid_(grid), components_(components),
        values_(static_cast<std::size_t>(components) * grid.total_nodes(), fill) {
    if (components_ < 1) throw std::invalid_argument("field: component count must be >= 1");
  }

  const Grid& grid() const { return grid_; }
  int components() const { return components_; }
  std::int64_t nodes() const { return grid_.total_nodes(); }

  double at(int c, std::int64_t node) const { return values_[index(c, node)]; }
  double& at(int c, std::int64_t node) { return values_[index(c, node)]; }
  std::span<const double> component(int c) const {
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(c) * nodes(), nodes());
  }
  std::span<double> component(int c) {
    return std::span<double>(values_).subspan(static_cast<std::size_t>(c) * nodes(), nodes());
  }
  std::span<const double> raw() const { return values_; }
  std::span<double> raw() { return values_; }

  bool all_finite() const { return pgs::all_finite(values_); }

  // Euclidean norm across components at one node.
  double node_norm(std::int64_t node) const {
    double s = 0.0;
    for (int c = 0; c < components_; ++c) {
      const double v = at(c, node);
      s += v * v;
    }
    return std::sqrt(s);
  }

  friend Field axpy(double a, const Field& x, const Field& y) {  // a*x + y
    Field out = y;
    for (std::size_t k = 0; k < out.values_.size(); ++k) out.values_[k] += a * x.values_[k];
    return out;
  }
  void add_scaled(double a, const Field& x) {
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * x.values_[k];
  }

 private:
  std::size_t index(int c, std::int64_t node) const {
    return static_cast<std::size_t>(c) * static_cast<std::size_t>(nodes()) + static_cast<std::size_t>(node);
  }

  Grid grid_;
  int components_;
  std::vector<double> values_;
};

inline double sup_norm(const Field& f) {
  double m = 0.0;
  for (std::int64_t node = 0; node < f.nodes(); ++node) m = std::max(m, f.node_norm(node));
  return m;
}

// Nonnegative single-component field (the aggregate w = sum_i |w_i| lives here).
class ScalarField {
 public:
  explicit ScalarField(Field field) : field_(std::move(field)) {
    if (field_.components() != 1) throw std::invalid_argument("scalar field: exactly one component");
    for (double v : field_.raw())
      if (!(v >= 0.0)) throw std::invalid_argument("scalar field: values must be nonnegative");
  }
  const Field& field() const { return field_; }
  double at(std::int64_t node) const { return field_.at(0, node); }

 private:
  Field field_;
};

}  // namespace pgs
