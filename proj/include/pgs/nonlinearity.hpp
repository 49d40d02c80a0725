#pragma once

// The coupled power nonlinearity G(U) = 1/(2(r+1)) sum beta_ij |u_i|^{r+1}|u_j|^{r+1},
// its gradient F = (nabla G), the sphere extrema c_G / C_F, and the critical
// exponents p_S, p_B. All functions here are pure and thread-safe.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pgs/numerics.hpp"

namespace pgs {

class CouplingMatrix {
 public:
  CouplingMatrix(int size, std::vector<double> entries) : size_(size), entries_(std::move(entries)) {
    if (size_ < 1) throw std::invalid_argument("coupling matrix: size must be >= 1");
    if (entries_.size() != static_cast<std::size_t>(size_) * size_)
      throw std::invalid_argument("coupling matrix: entry count does not match size");
    for (int i = 0; i < size_; ++i) {
      for (int j = 0; j < size_; ++j) {
        const double b = (*this)(i, j);
        if (!std::isfinite(b) || b < 0.0)
          throw std::invalid_argument("coupling matrix: entries must be finite and nonnegative");
        if (b != (*this)(j, i)) throw std::invalid_argument("coupling matrix: must be symmetric");
      }
      if ((*this)(i, i) <= 0.0) throw std::invalid_argument("coupling matrix: diagonal must be positive");
    }
  }

  static CouplingMatrix all_ones(int m) { return CouplingMatrix(m, std::vector<double>(static_cast<std::size_t>(m) * m, 1.0)); }
  static CouplingMatrix identity(int m) {
    std::vector<double> e(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) e[static_cast<std::size_t>(i) * m + i] = 1.0;
    return CouplingMatrix(m, std::move(e));
  }

  int size() const { return size_; }
  double operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i) * size_ + j]; }
  double row_sum(int i) const {
    return pairwise_accumulate(0, size_, [&](std::int64_t j) { return (*this)(i, static_cast<int>(j)); });
  }
  bool equal_row_sums(double rel_tol = 1e-12) const {
    const double s0 = row_sum(0);
    for (int i = 1; i < size_; ++i)
      if (std::fabs(row_sum(i) - s0) > rel_tol * std::max(1.0, std::fabs(s0))) return false;
    return true;
  }
  double total_sum() const {
    return pairwise_accumulate(0, size_, [&](std::int64_t i) { return row_sum(static_cast<int>(i)); });
  }

 private:
  int size_;
  std::vector<double> entries_;
};

// Dimensions and exponents of problem (P). p = 2r+1 and beta_exp = 1/(p-1)
// are derived, never stored, so the defining relations hold exactly.
struct SystemParams {
  int space_dim;
  int components;
  double r;
  CouplingMatrix coupling;

  SystemParams(int n_dim, int m_comp, double r_exp, CouplingMatrix beta)
      : space_dim(n_dim), components(m_comp), r(r_exp), coupling(std::move(beta)) {
    if (space_dim < 1) throw std::invalid_argument("system: space dimension must be >= 1");
    if (components < 1) throw std::invalid_argument("system: component count must be >= 1");
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("system: r must be positive and finite");
    if (coupling.size() != components)
      throw std::invalid_argument("system: coupling size must match component count");
  }

  double p() const { return 2.0 * r + 1.0; }
  double beta_exp() const { return 1.0 / (p() - 1.0); }
};

struct StructureConstants {
  double c_G;  // min of G on the unit sphere
  double C_F;  // max of |F| on the unit sphere
};

namespace detail {

// m_i = |u_i|^{r+1}, s_i = |u_i|^r sgn(u_i). The second form extends F
// continuously through u_i = 0 for every r > 0 (no 0^{negative}).
inline void power_parts(std::span<const double> u, double r, std::span<double> m, std::span<double> s) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::fabs(u[i]);
    m[i] = std::pow(a, r + 1.0);
    s[i] = std::pow(a, r) * sgn(u[i]);
  }
}

inline double coupling_row(const CouplingMatrix& beta, int i, std::span<const double> m) {
  return pairwise_accumulate(0, beta.size(),
                             [&](std::int64_t j) { return beta(i, static_cast<int>(j)) * m[static_cast<std::size_t>(j)]; });
}

}  // namespace detail

inline double eval_G(std::span<const double> u, const SystemParams& params) {
  if (static_cast<int>(u.size()) != params.components)
    throw std::invalid_argument("eval_G: vector length must match component count");
  require_finite(u, "eval_G");
  std::vector<double> m(u.size()), s(u.size());
  detail::power_parts(u, params.r, m, s);
  const double quad = pairwise_accumulate(0, params.components, [&](std::int64_t i) {
    return m[static_cast<std::size_t>(i)] * detail::coupling_row(params.coupling, static_cast<int>(i), m);
  });
  return quad / (2.0 * (params.r + 1.0));
}

inline void eval_F(std::span<const double> u, const SystemParams& params, std::span<double> out) {
  if (static_cast<int>(u.size()) != params.components || out.size() != u.size())
    throw std::invalid_argument("eval_F: vector length must match component count");
  require_finite(u, "eval_F");
  std::vector<double> m(u.size()), s(u.size());
  detail::power_parts(u, params.r, m, s);
  for (int i = 0; i < params.components; ++i)
    out[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i)] * detail::coupling_row(params.coupling, i, m);
}

inline std::vector<double> eval_F(std::span<const double> u, const SystemParams& params) {
  std::vector<double> out(u.size());
  eval_F(u, params, out);
  return out;
}

namespace detail {

inline double euclidean_norm(std::span<const double> u) {
  return std::sqrt(pairwise_accumulate(0, static_cast<std::int64_t>(u.size()),
                                       [&](std::int64_t i) { const double x = u[static_cast<std::size_t>(i)]; return x * x; }));
}

// Maps a box of angles onto the unit sphere in R^M (M = angles.size() + 1).
inline std::vector<double> sphere_point(std::span<const double> angles) {
  std::vector<double> u(angles.size() + 1);
  double radial = 1.0;
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    u[k] = radial * std::cos(angles[k]);
    radial *= std::sin(angles[k]);
  }
  u.back() = radial;
  return u;
}

template <class Fn>
double golden_section(Fn&& f, double lo, double hi, int iterations) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iterations; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

// Dense angular scan followed by coordinate-wise golden-section refinement of
// the best cell. G and |F| are smooth on the sphere and M <= 4, so this is
// cheap and reliable.
template <class Fn>
double extremize_on_sphere(Fn&& value, int m, int resolution, bool maximize) {
  const auto eval = [&](std::span<const double> angles) {
    const double v = value(sphere_point(angles));
    return maximize ? -v : v;
  };
  if (m == 1) {
    // the unit sphere in R^1 is just {+1, -1}
    const std::array<double, 1> plus{1.0}, minus{-1.0};
    const double vp = value(std::span<const double>(plus));
    const double vm = value(std::span<const double>(minus));
    return maximize ? std::max(vp, vm) : std::min(vp, vm);
  }
  const int n_angles = m - 1;
  std::vector<double> width(static_cast<std::size_t>(n_angles), 3.141592653589793);
  width.back() = 2.0 * 3.141592653589793;  // last angle wraps the full circle
  std::vector<int> idx(static_cast<std::size_t>(n_angles), 0);
  std::vector<double> best_angles(static_cast<std::size_t>(n_angles), 0.0);
  double best = std::numeric_limits<double>::infinity();
  // full tensor scan
  while (true) {
    std::vector<double> angles(static_cast<std::size_t>(n_angles));
    for (int k = 0; k < n_angles; ++k) angles[static_cast<std::size_t>(k)] = width[static_cast<std::size_t>(k)] * idx[static_cast<std::size_t>(k)] / resolution;
    const double v = eval(angles);
    if (v < best) {
      best = v;
      best_angles = angles;
    }
    int k = 0;
    for (; k < n_angles; ++k) {
      if (++idx[static_cast<std::size_t>(k)] < resolution) break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
    if (k == n_angles) break;
  }
  // coordinate-wise golden-section sweeps within one cell of the best sample
  std::vector<double> angles = best_angles;
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (int k = 0; k < n_angles; ++k) {
      const double cell = width[static_cast<std::size_t>(k)] / resolution;
      const double lo = angles[static_cast<std::size_t>(k)] - cell;
      const double hi = angles[static_cast<std::size_t>(k)] + cell;
      angles[static_cast<std::size_t>(k)] = golden_section(
          [&](double a) {
            std::vector<double> probe = angles;
            probe[static_cast<std::size_t>(k)] = a;
            return eval(probe);
          },
          lo, hi, 80);
    }
  }
  best = std::min(best, eval(angles));
  return maximize ? -best : best;
}

}  // namespace detail

// Sphere extrema c_G = min_{|U|=1} G and C_F = max_{|U|=1} |F|. Dense sampling
// plus local refinement; supported for M <= 4.
inline StructureConstants structure_constants(const SystemParams& params, int resolution = 4096) {
  if (resolution < 16) throw std::invalid_argument("structure_constants: resolution must be >= 16");
  if (params.components > 4)
    throw std::domain_error("structure_constants: dense sphere sampling unsupported for M > 4");
  const auto g_value = [&](std::span<const double> u) { return eval_G(u, params); };
  const auto f_value = [&](std::span<const double> u) {
    const auto f = eval_F(u, params);
    return detail::euclidean_norm(f);
  };
  StructureConstants out{};
  out.c_G = detail::extremize_on_sphere(g_value, params.components, resolution, /*maximize=*/false);
  out.C_F = detail::extremize_on_sphere(f_value, params.components, resolution, /*maximize=*/true);
  if (!(out.c_G > 0.0)) throw std::runtime_error("structure_constants: c_G must be positive");
  // (p+1) c_G = min U.F <= max |F| on the sphere
  if (out.c_G > out.C_F) throw std::logic_error("structure_constants: expected c_G <= C_F");
  return out;
}

// Randomized verification of the structure conditions (2.1)-(2.2): degree
// p+1 homogeneity of G, degree p homogeneity of F, the Euler identity
// U.F = (p+1) G, |F| <= C_F |U|^p and c_G |U|^{p+1} <= G <= C_F |U|^{p+1}.
struct StructureReport {
  int samples = 0;
  StructureConstants constants{};
  double max_homogeneity_g = 0.0;
  double max_homogeneity_f = 0.0;
  double max_euler = 0.0;
  double max_f_bound = 0.0;      // positive part of (|F| - C_F |U|^p) / scale
  double max_sandwich_low = 0.0; // positive part of (c_G |U|^{p+1} - G) / scale
  double max_sandwich_high = 0.0;
  double worst() const {
    return std::max({max_homogeneity_g, max_homogeneity_f, max_euler, max_f_bound, max_sandwich_low,
                     max_sandwich_high});
  }
  bool passes(double tol) const { return worst() <= tol; }
};

inline StructureReport check_structure(const SystemParams& params, int sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("check_structure: sample_count must be >= 1");
  StructureReport report;
  report.samples = sample_count;
  report.constants = structure_constants(params);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> comp(-2.0, 2.0);
  std::uniform_real_distribution<double> lam(0.0, 2.0);
  const double p = params.p();
  std::vector<double> u(static_cast<std::size_t>(params.components));
  std::vector<double> lu(u.size());
  for (int n = 0; n < sample_count; ++n) {
    for (auto& x : u) x = comp(rng);
    const double lambda = (n == 0) ? 0.0 : lam(rng);  // exercise the G(0) = 0 branch
    for (std::size_t i = 0; i < u.size(); ++i) lu[i] = lambda * u[i];
    const double g = eval_G(u, params);
    const double g_scaled = eval_G(lu, params);
    const auto f = eval_F(u, params);
    const auto f_scaled = eval_F(lu, params);
    const double norm_u = detail::euclidean_norm(u);
    const double scale_g = std::max(std::pow(lambda, p + 1.0) * g, 1e-300);
    report.max_homogeneity_g =
        std::max(report.max_homogeneity_g, std::fabs(g_scaled - std::pow(lambda, p + 1.0) * g) / scale_g);
    double f_diff = 0.0, f_scale = 1e-300;
    for (std::size_t i = 0; i < u.size(); ++i) {
      f_diff = std::max(f_diff, std::fabs(f_scaled[i] - std::pow(lambda, p) * f[i]));
      f_scale = std::max(f_scale, std::fabs(std::pow(lambda, p) * f[i]));
    }
    report.max_homogeneity_f = std::max(report.max_homogeneity_f, f_diff / f_scale);
    const double udotf = pairwise_accumulate(0, params.components, [&](std::int64_t i) {
      return u[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(i)];
    });
    report.max_euler = std::max(report.max_euler, std::fabs(udotf - (p + 1.0) * g) / std::max((p + 1.0) * g, 1e-300));
    const double pow_p = std::pow(norm_u, p);
    const double pow_p1 = std::pow(norm_u, p + 1.0);
    report.max_f_bound =
        std::max(report.max_f_bound, (detail::euclidean_norm(f) - report.constants.C_F * pow_p) / std::max(pow_p, 1e-300));
    report.max_sandwich_low =
        std::max(report.max_sandwich_low, (report.constants.c_G * pow_p1 - g) / std::max(pow_p1, 1e-300));
    report.max_sandwich_high =
        std::max(report.max_sandwich_high, (g - report.constants.C_F * pow_p1) / std::max(pow_p1, 1e-300));
  }
  report.max_f_bound = std::max(report.max_f_bound, 0.0);
  report.max_sandwich_low = std::max(report.max_sandwich_low, 0.0);
  report.max_sandwich_high = std::max(report.max_sandwich_high, 0.0);
  return report;
}

// p_S and p_B are finite only for N >= 3; the infinite case is an explicit
// state so that subcriticality tests like p < p_S stay exact.
class CriticalExponent {
 public:
  static CriticalExponent finite(double v) { return CriticalExponent(false, v); }
  static CriticalExponent infinite() { return CriticalExponent(true, 0.0); }
  bool is_infinite() const { return infinite_; }
  double value() const {
    if (infinite_) throw std::domain_error("critical exponent is infinite");
    return value_;
  }
  bool bounds_above(double p) const { return infinite_ || p < value_; }
  friend bool operator<(double p, const CriticalExponent& e) { return e.bounds_above(p); }
  friend bool operator<(const CriticalExponent& a, const CriticalExponent& b) {
    if (a.infinite_) return false;
    return b.infinite_ || a.value_ < b.value_;
  }

 private:
  CriticalExponent(bool inf, double v) : infinite_(inf), value_(v) {}
  bool infinite_;
  double value_;
};

struct SobolevExponents {
  CriticalExponent p_S;
  CriticalExponent p_B;
};

inline SobolevExponents sobolev_exponents(int space_dim) {
  if (space_dim <= 0) throw std::domain_error("sobolev_exponents: dimension must be positive");
  if (space_dim <= 2) return {CriticalExponent::infinite(), CriticalExponent::infinite()};
  const double n = static_cast<double>(space_dim);
  SobolevExponents out{CriticalExponent::finite((n + 2.0) / (n - 2.0)),
                       CriticalExponent::finite(n * (n + 2.0) / ((n - 1.0) * (n - 1.0)))};
  if (!(out.p_B < out.p_S)) throw std::logic_error("sobolev_exponents: expected p_S > p_B for N >= 3");
  return out;
}

}  // namespace pgs
