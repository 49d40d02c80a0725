#pragma once

// Self-similar variables: W(y,s) = (T-t)^beta U(a + sqrt(T-t) y, t) with
// s = -log(T-t), the rescaled evolution equation, and its constant fixed
// points. The exported rhs_rescaled is the nodewise "Laplacian minus drift"
// form; the time stepper integrates the conservative divergence form, whose
// quadratic form is exactly the staggered gradient energy, so the discrete
// energy dissipation identity holds to roundoff along the flow.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pgs/grid.hpp"
#include "pgs/nonlinearity.hpp"
#include "pgs/operators.hpp"
#include "pgs/quadrature.hpp"

namespace pgs {

struct SelfSimilarFrame {
  std::array<double, 2> center{0.0, 0.0};
  double T = 1.0;
  double s = 0.0;
  Field W;

  SelfSimilarFrame(std::array<double, 2> a, double blowup_time, double rescaled_time, Field w)
      : center(a), T(blowup_time), s(rescaled_time), W(std::move(w)) {
    if (!(T > 0.0)) throw std::invalid_argument("self-similar frame: T must be positive");
    if (!W.all_finite()) throw std::domain_error("self-similar frame: field must be finite");
  }

  double physical_time() const { return T - std::exp(-s); }
};

inline SelfSimilarFrame to_selfsimilar(const Field& u, double t, std::array<double, 2> a, double T,
                                       const SystemParams& params, const Grid& y_grid) {
  if (!(t >= 0.0) || !(t < T)) throw std::invalid_argument("to_selfsimilar: need 0 <= t < T");
  if (!u.all_finite()) throw std::domain_error("to_selfsimilar: non-finite field");
  const double gap = T - t;
  const double root = std::sqrt(gap);
  const double amp = std::pow(gap, params.beta_exp());
  Field w(y_grid, u.components());
  for (std::int64_t node = 0; node < y_grid.total_nodes(); ++node) {
    const auto y = y_grid.point(node);
    const std::array<double, 2> x{a[0] + root * y[0], a[1] + root * y[1]};
    for (int c = 0; c < u.components(); ++c)
      w.at(c, node) = amp * sample_linear(u, c, std::span<const double>(x.data(), u.grid().space_dim()));
  }
  return SelfSimilarFrame(a, T, -std::log(gap), std::move(w));
}

inline std::pair<Field, double> from_selfsimilar(const SelfSimilarFrame& frame, const SystemParams& params,
                                                 const Grid& x_grid) {
  const double gap = std::exp(-frame.s);
  const double root = std::sqrt(gap);
  const double amp = std::pow(gap, -params.beta_exp());
  Field u(x_grid, frame.W.components());
  for (std::int64_t node = 0; node < x_grid.total_nodes(); ++node) {
    const auto x = x_grid.point(node);
    const std::array<double, 2> y{(x[0] - frame.center[0]) / root, (x[1] - frame.center[1]) / root};
    for (int c = 0; c < u.components(); ++c)
      u.at(c, node) =
          amp * sample_linear(frame.W, c, std::span<const double>(y.data(), x_grid.space_dim()));
  }
  return {std::move(u), frame.T - gap};
}

namespace detail {

inline void add_reaction(const Field& w, const SystemParams& params, Field& out, double sign) {
  std::vector<double> u(static_cast<std::size_t>(w.components()));
  std::vector<double> f(u.size());
  for (std::int64_t node = 0; node < w.nodes(); ++node) {
    for (int c = 0; c < w.components(); ++c) u[static_cast<std::size_t>(c)] = w.at(c, node);
    eval_F(u, params, f);
    for (int c = 0; c < w.components(); ++c) out.at(c, node) += sign * f[static_cast<std::size_t>(c)];
  }
}

}  // namespace detail

// Nodewise s-derivative of Eq-form: Delta W - (1/2) y . grad W - beta W + F(W),
// central differences with zero ghost values.
inline Field rhs_rescaled(const Field& w, const SystemParams& params) {
  if (!w.all_finite()) throw std::domain_error("rhs_rescaled: non-finite field");
  Field out = laplacian_dirichlet(w);
  const Field drift = half_drift_dirichlet(w);
  const double beta = params.beta_exp();
  for (int c = 0; c < w.components(); ++c) {
    for (std::int64_t node = 0; node < w.nodes(); ++node)
      out.at(c, node) += -drift.at(c, node) - beta * w.at(c, node);
  }
  detail::add_reaction(w, params, out, +1.0);
  return out;
}

// Divergence form of the same operator: (1/rho) div(rho grad W) - beta W + F(W).
inline Field rhs_rescaled_divergence(const Field& w, const SystemParams& params) {
  if (!w.all_finite()) throw std::domain_error("rhs_rescaled_divergence: non-finite field");
  Field out = divergence_form_operator(w);
  const double beta = params.beta_exp();
  for (int c = 0; c < w.components(); ++c) {
    for (std::int64_t node = 0; node < w.nodes(); ++node) out.at(c, node) -= beta * w.at(c, node);
  }
  detail::add_reaction(w, params, out, +1.0);
  return out;
}

// Explicit stability bound for the linear part of the rescaled operator on
// this grid (Gershgorin estimate; RK4 real-axis stability limit 2.78).
inline double rescaled_stability_ds(const Grid& grid, const SystemParams& params) {
  const double h = grid.spacing();
  double worst = 0.0;
  for (std::int64_t node = 0; node < grid.total_nodes(); ++node) {
    const auto y = grid.point(node);
    double row = 0.0;
    for (int axis = 0; axis < grid.space_dim(); ++axis) {
      const double yk = y[static_cast<std::size_t>(axis)];
      const double other = y[static_cast<std::size_t>(1 - axis)];
      const double rho_node = std::exp(-(yk * yk + other * other) / 4.0);
      const double rho_p = std::exp(-((yk + 0.5 * h) * (yk + 0.5 * h) + other * other) / 4.0);
      const double rho_m = std::exp(-((yk - 0.5 * h) * (yk - 0.5 * h) + other * other) / 4.0);
      row += 2.0 * (rho_p + rho_m) / (rho_node * h * h);
    }
    worst = std::max(worst, row);
  }
  return 2.78 / (worst + params.beta_exp());
}

inline SelfSimilarFrame step_rescaled(const SelfSimilarFrame& frame, double ds, const SystemParams& params) {
  if (!(ds > 0.0)) throw std::invalid_argument("step_rescaled: ds must be positive");
  if (ds > rescaled_stability_ds(frame.W.grid(), params))
    throw std::invalid_argument("step_rescaled: ds exceeds the explicit stability bound");
  const Field& w = frame.W;
  const Field k1 = rhs_rescaled_divergence(w, params);
  const Field k2 = rhs_rescaled_divergence(axpy(0.5 * ds, k1, w), params);
  const Field k3 = rhs_rescaled_divergence(axpy(0.5 * ds, k2, w), params);
  const Field k4 = rhs_rescaled_divergence(axpy(ds, k3, w), params);
  Field next = w;
  next.add_scaled(ds / 6.0, k1);
  next.add_scaled(ds / 3.0, k2);
  next.add_scaled(ds / 3.0, k3);
  next.add_scaled(ds / 6.0, k4);
  if (!next.all_finite()) throw std::runtime_error("step_rescaled: instability (non-finite update)");
  return SelfSimilarFrame(frame.center, frame.T, frame.s + ds, std::move(next));
}

// Equal-component constant fixed point of the rescaled equation; requires the
// coupling rows to have equal sums.
inline std::vector<double> kappa_constant(const SystemParams& params) {
  if (!params.coupling.equal_row_sums())
    throw std::domain_error("kappa_constant: coupling rows must have equal sums");
  const double value = std::pow(params.beta_exp() / params.coupling.row_sum(0), params.beta_exp());
  return std::vector<double>(static_cast<std::size_t>(params.components), value);
}

// Frame sequence at uniform recorded spacing, produced by the rescaled flow.
struct RescaledTrajectory {
  std::array<double, 2> center{0.0, 0.0};
  double T = 1.0;
  double s0 = 0.0;
  double ds = 0.0;  // spacing between recorded frames
  std::vector<Field> frames;

  double s_at(std::size_t k) const { return s0 + ds * static_cast<double>(k); }
  double span() const { return frames.empty() ? 0.0 : ds * static_cast<double>(frames.size() - 1); }
};

inline RescaledTrajectory run_rescaled(const SelfSimilarFrame& start, double s_length, double ds,
                                       int record_stride, const SystemParams& params) {
  if (record_stride < 1) throw std::invalid_argument("run_rescaled: record stride must be >= 1");
  const auto steps_total = static_cast<std::int64_t>(std::llround(s_length / ds));
  if (steps_total < 1) throw std::invalid_argument("run_rescaled: need at least one step");
  RescaledTrajectory traj;
  traj.center = start.center;
  traj.T = start.T;
  traj.s0 = start.s;
  traj.ds = ds * record_stride;
  traj.frames.push_back(start.W);
  SelfSimilarFrame frame = start;
  for (std::int64_t k = 1; k <= steps_total; ++k) {
    frame = step_rescaled(frame, ds, params);
    if (k % record_stride == 0) traj.frames.push_back(frame.W);
  }
  return traj;
}

}  // namespace pgs
