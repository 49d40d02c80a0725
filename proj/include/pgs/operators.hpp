#pragma once

// Discrete differential operators on grid fields: second-order central
// stencils with one-sided closures for the generic diagnostics, and
// Dirichlet-closed (zero ghost) variants used by the solvers. The rescaled
// linear operator comes in two discrete forms, the nodewise one of Eq-style
// "Laplacian minus drift" and the conservative divergence form; they agree
// to O(h^2) and the latter pairs exactly with the staggered energy.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pgs/grid.hpp"
#include "pgs/numerics.hpp"

namespace pgs {

// Central second differences in the interior, one-sided second-order stencils
// on the boundary layer.
inline Field laplacian(const Field& f) {
  const Grid& g = f.grid();
  const int n = g.axis_points();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  Field out(g, f.components());
  for (int c = 0; c < f.components(); ++c) {
    for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
      const auto ij = g.unflatten(node);
      double acc = 0.0;
      for (int axis = 0; axis < g.space_dim(); ++axis) {
        const int k = axis == 0 ? ij[0] : ij[1];
        const auto at = [&](int kk) {
          return axis == 0 ? f.at(c, g.flat(kk, ij[1])) : f.at(c, g.flat(ij[0], kk));
        };
        if (k == 0) {
          acc += (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) * inv_h2;
        } else if (k == n - 1) {
          acc += (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) * inv_h2;
        } else {
          acc += (at(k + 1) - 2.0 * at(k) + at(k - 1)) * inv_h2;
        }
      }
      out.at(c, node) = acc;
    }
  }
  return out;
}

// Per-axis first derivatives; result[axis] holds d f / d y_axis for every
// component. Central in the interior, one-sided second order at the ends.
inline std::vector<Field> gradient(const Field& f) {
  const Grid& g = f.grid();
  const int n = g.axis_points();
  const double inv_2h = 1.0 / (2.0 * g.spacing());
  std::vector<Field> out;
  for (int axis = 0; axis < g.space_dim(); ++axis) out.emplace_back(g, f.components());
  for (int c = 0; c < f.components(); ++c) {
    for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
      const auto ij = g.unflatten(node);
      for (int axis = 0; axis < g.space_dim(); ++axis) {
        const int k = axis == 0 ? ij[0] : ij[1];
        const auto at = [&](int kk) {
          return axis == 0 ? f.at(c, g.flat(kk, ij[1])) : f.at(c, g.flat(ij[0], kk));
        };
        double d;
        if (k == 0) {
          d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv_2h;
        } else if (k == n - 1) {
          d = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv_2h;
        } else {
          d = (at(k + 1) - at(k - 1)) * inv_2h;
        }
        out[static_cast<std::size_t>(axis)].at(c, node) = d;
      }
    }
  }
  return out;
}

namespace detail {

inline double value_or_zero(const Field& f, int c, const Grid& g, int i, int j) {
  const int n = g.axis_points();
  if (i < 0 || i >= n || j < 0 || j >= n) return 0.0;
  return f.at(c, g.flat(i, j));
}

}  // namespace detail

// Laplacian with homogeneous Dirichlet closure: stencil values outside the
// grid are zero.
inline Field laplacian_dirichlet(const Field& f) {
  const Grid& g = f.grid();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  Field out(g, f.components());
  for (int c = 0; c < f.components(); ++c) {
    for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
      const auto ij = g.unflatten(node);
      const int i = ij[0], j = ij[1];
      double acc = detail::value_or_zero(f, c, g, i + 1, j) - 2.0 * f.at(c, node) +
                   detail::value_or_zero(f, c, g, i - 1, j);
      if (g.space_dim() == 2)
        acc += detail::value_or_zero(f, c, g, i, j + 1) - 2.0 * f.at(c, node) +
               detail::value_or_zero(f, c, g, i, j - 1);
      out.at(c, node) = acc * inv_h2;
    }
  }
  return out;
}

// (1/2) y . grad f with central differences and zero ghost values.
inline Field half_drift_dirichlet(const Field& f) {
  const Grid& g = f.grid();
  const double inv_2h = 1.0 / (2.0 * g.spacing());
  Field out(g, f.components());
  for (int c = 0; c < f.components(); ++c) {
    for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
      const auto ij = g.unflatten(node);
      const auto y = g.point(node);
      const int i = ij[0], j = ij[1];
      double acc = 0.5 * y[0] * (detail::value_or_zero(f, c, g, i + 1, j) -
                                 detail::value_or_zero(f, c, g, i - 1, j)) * inv_2h;
      if (g.space_dim() == 2)
        acc += 0.5 * y[1] * (detail::value_or_zero(f, c, g, i, j + 1) -
                             detail::value_or_zero(f, c, g, i, j - 1)) * inv_2h;
      out.at(c, node) = acc;
    }
  }
  return out;
}

// Conservative form (1/rho) div(rho grad f) with rho at face midpoints and
// zero ghost values. Summation against rho-weighted node values pairs
// exactly with face_gradient_energy.
inline Field divergence_form_operator(const Field& f) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  const double inv_h2 = 1.0 / (h * h);
  Field out(g, f.components());
  const auto axis_factor = [&](double ym, double yother) {
    return std::exp(-(ym * ym + yother * yother) / 4.0);
  };
  for (int c = 0; c < f.components(); ++c) {
    for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
      const auto ij = g.unflatten(node);
      const auto y = g.point(node);
      const int i = ij[0], j = ij[1];
      const double rho_node = std::exp(-g.radius_sq(node) / 4.0);
      const double center = f.at(c, node);
      double acc = 0.0;
      {
        const double right = detail::value_or_zero(f, c, g, i + 1, j);
        const double left = detail::value_or_zero(f, c, g, i - 1, j);
        const double rho_r = axis_factor(y[0] + 0.5 * h, y[1]);
        const double rho_l = axis_factor(y[0] - 0.5 * h, y[1]);
        acc += (rho_r * (right - center) - rho_l * (center - left)) * inv_h2;
      }
      if (g.space_dim() == 2) {
        const double upper = detail::value_or_zero(f, c, g, i, j + 1);
        const double lower = detail::value_or_zero(f, c, g, i, j - 1);
        const double rho_u = axis_factor(y[1] + 0.5 * h, y[0]);
        const double rho_d = axis_factor(y[1] - 0.5 * h, y[0]);
        acc += (rho_u * (upper - center) - rho_d * (center - lower)) * inv_h2;
      }
      out.at(c, node) = acc / rho_node;
    }
  }
  return out;
}

// Multilinear interpolation of one component at an arbitrary point.
inline double sample_linear(const Field& f, int c, std::span<const double> x) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  const double L = g.half_extent();
  const int n = g.axis_points();
  const double pad = 1e-10 * std::max(1.0, L);
  std::array<int, 2> base{0, 0};
  std::array<double, 2> frac{0.0, 0.0};
  for (int axis = 0; axis < g.space_dim(); ++axis) {
    const double xi = x[static_cast<std::size_t>(axis)];
    if (xi < -L - pad || xi > L + pad)
      throw TruncationError("sample_linear: point outside the grid");
    double u = (std::min(std::max(xi, -L), L) + L) / h;
    int k = static_cast<int>(std::floor(u));
    if (k >= n - 1) k = n - 2;
    base[static_cast<std::size_t>(axis)] = k;
    frac[static_cast<std::size_t>(axis)] = u - k;
  }
  if (g.space_dim() == 1) {
    const double v0 = f.at(c, g.flat(base[0]));
    const double v1 = f.at(c, g.flat(base[0] + 1));
    return v0 + frac[0] * (v1 - v0);
  }
  const double v00 = f.at(c, g.flat(base[0], base[1]));
  const double v10 = f.at(c, g.flat(base[0] + 1, base[1]));
  const double v01 = f.at(c, g.flat(base[0], base[1] + 1));
  const double v11 = f.at(c, g.flat(base[0] + 1, base[1] + 1));
  const double a = v00 + frac[0] * (v10 - v00);
  const double b = v01 + frac[0] * (v11 - v01);
  return a + frac[1] * (b - a);
}

}  // namespace pgs
