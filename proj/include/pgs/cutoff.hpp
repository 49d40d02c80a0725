#pragma once

// Smooth radial cutoffs phi(|x|/R): identically 1 up to R, identically 0 from
// 2R on, C-infinity in between. The transition is the standard exponential
// bump h(x) = e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)}), which is symmetric about
// the midpoint, so phi(1.5 R) = 1/2 exactly.

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

namespace pgs {

namespace detail {

struct BumpParts {
  double g, dg, ddg;  // transition function and derivatives at x in (0,1)
};

inline BumpParts transition(double x) {
  if (x <= 0.0) return {0.0, 0.0, 0.0};
  if (x >= 1.0) return {1.0, 0.0, 0.0};
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  const double da = a / (x * x);
  const double db = -b / ((1.0 - x) * (1.0 - x));
  const double dda = a * (1.0 - 2.0 * x) / (x * x * x * x);
  const double ddb = b * (2.0 * x - 1.0) / std::pow(1.0 - x, 4);
  const double den = a + b;
  const double g = a / den;
  const double num1 = da * b - a * db;
  const double dg = num1 / (den * den);
  const double ddg = (dda * b - a * ddb) / (den * den) - 2.0 * num1 * (da + db) / (den * den * den);
  return {g, dg, ddg};
}

}  // namespace detail

// Profile function phi(t) on [0, inf): 1 for t <= 1, 0 for t >= 2.
inline double bump_profile(double t) { return 1.0 - detail::transition(t - 1.0).g; }
inline double bump_profile_deriv(double t) { return -detail::transition(t - 1.0).dg; }
inline double bump_profile_second_deriv(double t) { return -detail::transition(t - 1.0).ddg; }

struct CutoffProfile {
  double radius;

  explicit CutoffProfile(double r) : radius(r) {
    if (!(radius > 0.0) || !std::isfinite(radius))
      throw std::invalid_argument("cutoff: radius must be positive and finite");
  }

  double value_at_radius(double dist) const { return bump_profile(dist / radius); }

  double value(std::span<const double> x) const {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    return value_at_radius(std::sqrt(r2));
  }

  // Gradient of phi(|x|/R); zero wherever phi is flat, in particular at the
  // origin where |x| is not differentiable but phi is constant.
  std::array<double, 2> gradient(std::span<const double> x) const {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    const double dist = std::sqrt(r2);
    const double t = dist / radius;
    if (t <= 1.0 || t >= 2.0) return {0.0, 0.0};
    const double factor = bump_profile_deriv(t) / (radius * dist);
    std::array<double, 2> g{0.0, 0.0};
    for (std::size_t k = 0; k < x.size() && k < 2; ++k) g[k] = factor * x[k];
    return g;
  }

  double laplacian(std::span<const double> x, int space_dim) const {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    const double dist = std::sqrt(r2);
    const double t = dist / radius;
    if (t <= 1.0 || t >= 2.0) return 0.0;
    return bump_profile_second_deriv(t) / (radius * radius) +
           bump_profile_deriv(t) * (space_dim - 1) / (radius * dist);
  }
};

inline double cutoff_value(const CutoffProfile& profile, std::span<const double> x) {
  return profile.value(x);
}

}  // namespace pgs
