#pragma once

// Integration of the physical problem dU/dt = Delta U + F(U) with homogeneous
// Dirichlet truncation, blow-up detection, blow-up time estimation through
// the affine law sup|U|^{1-p} ~ (p-1)(T-t), and the type-I rate fit. An ODE
// mode drops the Laplacian so that spatially constant data follows the
// closed-form reaction solution exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pgs/grid.hpp"
#include "pgs/nonlinearity.hpp"
#include "pgs/operators.hpp"

namespace pgs {

struct PhysicalState {
  double t = 0.0;
  Field U;

  PhysicalState(double time, Field u) : t(time), U(std::move(u)) {
    if (!(t >= 0.0)) throw std::invalid_argument("physical state: time must be >= 0");
    if (!U.all_finite()) throw std::domain_error("physical state: field must be finite");
  }
};

namespace detail {

inline void add_reaction_physical(const Field& u, const SystemParams& params, Field& out) {
  std::vector<double> uv(static_cast<std::size_t>(u.components()));
  std::vector<double> fv(uv.size());
  for (std::int64_t node = 0; node < u.nodes(); ++node) {
    for (int c = 0; c < u.components(); ++c) uv[static_cast<std::size_t>(c)] = u.at(c, node);
    eval_F(uv, params, fv);
    for (int c = 0; c < u.components(); ++c) out.at(c, node) += fv[static_cast<std::size_t>(c)];
  }
}

inline Field rhs_physical_impl(const Field& u, const SystemParams& params, bool ode_mode) {
  Field out = ode_mode ? Field(u.grid(), u.components()) : laplacian_dirichlet(u);
  add_reaction_physical(u, params, out);
  return out;
}

}  // namespace detail

inline Field rhs_physical(const PhysicalState& state, const SystemParams& params) {
  if (!state.U.all_finite()) throw std::domain_error("rhs_physical: non-finite field");
  return detail::rhs_physical_impl(state.U, params, /*ode_mode=*/false);
}

// Classical four-stage Runge-Kutta update. Outside ODE mode dt must respect
// the diffusion stability limit h^2 / (2N).
inline PhysicalState step(const PhysicalState& state, double dt, const SystemParams& params,
                          bool ode_mode = false) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  if (!ode_mode) {
    const double h = state.U.grid().spacing();
    const double limit = h * h / (2.0 * state.U.grid().space_dim());
    if (dt > limit * (1.0 + 1e-12)) throw std::invalid_argument("step: dt exceeds the stability limit");
  }
  const Field& u = state.U;
  const Field k1 = detail::rhs_physical_impl(u, params, ode_mode);
  const Field k2 = detail::rhs_physical_impl(axpy(0.5 * dt, k1, u), params, ode_mode);
  const Field k3 = detail::rhs_physical_impl(axpy(0.5 * dt, k2, u), params, ode_mode);
  const Field k4 = detail::rhs_physical_impl(axpy(dt, k3, u), params, ode_mode);
  Field next = u;
  next.add_scaled(dt / 6.0, k1);
  next.add_scaled(dt / 3.0, k2);
  next.add_scaled(dt / 3.0, k3);
  next.add_scaled(dt / 6.0, k4);
  return PhysicalState(state.t + dt, std::move(next));
}

struct TrajectoryPoint {
  double t;
  double sup_norm;
  double dt;  // step size used to reach this state (0 for the initial record)
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  std::vector<std::pair<double, Field>> snapshots;
  std::int64_t rejected_steps = 0;
};

struct BlowupEstimate {
  double T_est;
  double window_lo;
  double window_hi;
  double residual;  // rms misfit of the affine extrapolation model
};

enum class BlowupOutcome { blowup, no_blowup_detected };

struct SolveControls {
  double dt_init = 1e-4;
  double sup_threshold = 1e6;  // stop once sup|U| reaches this
  double t_max = 10.0;
  bool ode_mode = false;
  double cfl_safety = 0.8;
  double growth_cap = 0.10;  // per-step relative sup-norm jump triggering halving
  int snapshot_stride = 0;   // 0 disables field snapshots
};

struct BlowupRun {
  Trajectory trajectory;
  BlowupOutcome outcome = BlowupOutcome::no_blowup_detected;
  std::optional<BlowupEstimate> estimate;
};

namespace detail {

// Affine least-squares fit y ~ a + b t; returns (a, b, rms residual).
inline std::array<double, 3> affine_fit(std::span<const double> t, std::span<const double> y) {
  const auto n = static_cast<double>(t.size());
  double st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
  }
  const double mt = st / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxx += (t[i] - mt) * (t[i] - mt);
    sxy += (t[i] - mt) * (y[i] - my);
  }
  const double b = sxy / sxx;
  const double a = my - b * mt;
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - (a + b * t[i]);
    ss += r * r;
  }
  return {a, b, std::sqrt(ss / n)};
}

// Blow-up time from the final decade of sup-norm growth: sup^{1-p} is affine
// in t under the type-I ansatz, so its root extrapolates T.
inline std::optional<BlowupEstimate> estimate_blowup_time(const Trajectory& traj, double p) {
  if (traj.points.size() < 8) return std::nullopt;
  const double sup_last = traj.points.back().sup_norm;
  if (!(sup_last > 0.0)) return std::nullopt;
  std::vector<double> ts, ys;
  for (const auto& pt : traj.points) {
    if (pt.sup_norm >= 0.1 * sup_last && pt.sup_norm > 0.0) {
      ts.push_back(pt.t);
      ys.push_back(std::pow(pt.sup_norm, 1.0 - p));
    }
  }
  if (ts.size() < 5) return std::nullopt;
  const auto fit = affine_fit(ts, ys);
  if (!(fit[1] < 0.0)) return std::nullopt;
  const double T = -fit[0] / fit[1];
  if (!(T > ts.back())) return std::nullopt;
  return BlowupEstimate{T, ts.front(), ts.back(), fit[2]};
}

}  // namespace detail

inline BlowupRun run_to_blowup(const Field& u0, const SystemParams& params, const SolveControls& controls) {
  if (!u0.all_finite()) throw std::domain_error("run_to_blowup: non-finite initial data");
  if (!(controls.dt_init > 0.0)) throw std::invalid_argument("run_to_blowup: dt_init must be positive");
  const Grid& g = u0.grid();
  double dt_cap = controls.dt_init;
  if (!controls.ode_mode) {
    const double h = g.spacing();
    dt_cap = std::min(dt_cap, controls.cfl_safety * h * h / (2.0 * g.space_dim()));
  }

  BlowupRun run;
  PhysicalState state(0.0, u0);
  double sup = sup_norm(state.U);
  run.trajectory.points.push_back({0.0, sup, 0.0});
  if (controls.snapshot_stride > 0) run.trajectory.snapshots.emplace_back(0.0, state.U);

  double dt = dt_cap;
  std::int64_t accepted = 0;
  const double dt_floor = 1e-260;
  while (sup < controls.sup_threshold && state.t < controls.t_max && dt > dt_floor) {
    bool stepped = false;
    PhysicalState candidate = state;  // placeholder; replaced on success
    while (!stepped && dt > dt_floor) {
      candidate = step(state, std::min(dt, dt_cap), params, controls.ode_mode);
      const bool finite = candidate.U.all_finite();
      const double sup_new = finite ? sup_norm(candidate.U) : 0.0;
      if (!finite) {
        // overflow inside a step counts as blow-up reached; retry smaller to
        // resolve the last decade unless dt is already exhausted
        ++run.trajectory.rejected_steps;
        dt *= 0.5;
        continue;
      }
      if (sup > 0.0 && sup_new > (1.0 + controls.growth_cap) * sup) {
        ++run.trajectory.rejected_steps;
        dt *= 0.5;
        continue;
      }
      state = candidate;
      sup = sup_new;
      stepped = true;
    }
    if (!stepped) break;
    ++accepted;
    run.trajectory.points.push_back({state.t, sup, std::min(dt, dt_cap)});
    if (controls.snapshot_stride > 0 && accepted % controls.snapshot_stride == 0)
      run.trajectory.snapshots.emplace_back(state.t, state.U);
  }

  // dt exhausting below the floor can only happen while rejecting overflowing
  // steps, which is itself a blow-up signal
  if (sup >= controls.sup_threshold || dt <= dt_floor) {
    run.outcome = BlowupOutcome::blowup;
    run.estimate = detail::estimate_blowup_time(run.trajectory, params.p());
  } else {
    run.outcome = BlowupOutcome::no_blowup_detected;
  }
  return run;
}

struct RateFit {
  double exponent;
  double plateau;
  double window_lo;
  double window_hi;
  double misfit;
};

// Least-squares slope of log sup|U| against -log(T_est - t) over the final
// two decades of T_est - t; the plateau is the median of
// (T_est - t)^{1/(p-1)} sup|U| over the same window.
inline RateFit fit_rate(const Trajectory& traj, double T_est, const SystemParams& params) {
  std::vector<double> xs, ys, plateaus;
  if (traj.points.empty()) throw std::invalid_argument("fit_rate: empty trajectory");
  double gap_min = std::numeric_limits<double>::infinity();
  double gap_max = 0.0;
  for (const auto& pt : traj.points) {
    if (!(pt.sup_norm > 0.0) || !(T_est - pt.t > 0.0)) continue;
    gap_min = std::min(gap_min, T_est - pt.t);
    gap_max = std::max(gap_max, T_est - pt.t);
  }
  if (!(gap_max / gap_min >= 100.0 * (1.0 - 1e-9)))
    throw std::invalid_argument("fit_rate: trajectory must span at least two decades of T_est - t");
  const double gap_hi = 100.0 * gap_min;
  double t_lo = std::numeric_limits<double>::infinity(), t_hi = 0.0;
  for (const auto& pt : traj.points) {
    const double gap = T_est - pt.t;
    if (!(gap > 0.0) || !(pt.sup_norm > 0.0) || gap > gap_hi) continue;
    xs.push_back(-std::log(gap));
    ys.push_back(std::log(pt.sup_norm));
    plateaus.push_back(std::pow(gap, params.beta_exp()) * pt.sup_norm);
    t_lo = std::min(t_lo, pt.t);
    t_hi = std::max(t_hi, pt.t);
  }
  if (xs.size() < 20) throw std::invalid_argument("fit_rate: need >= 20 samples in the fit window");
  const auto fit = detail::affine_fit(xs, ys);
  std::vector<double> sorted = plateaus;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                   sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (!std::isfinite(fit[1]) || !std::isfinite(median) || !(median > 0.0))
    throw std::runtime_error("fit_rate: degenerate fit");
  return RateFit{fit[1], median, t_lo, t_hi, fit[2]};
}

// Similarity normalization Z(x) = T^{1/(p-1)} U0(sqrt(T) x). The output lives
// on the correspondingly rescaled grid (half extent L / sqrt(T), same node
// count), which makes the transform exact nodewise.
inline Field similarity_normalize(const Field& u0, double T, const SystemParams& params) {
  if (!(T > 0.0)) throw std::invalid_argument("similarity_normalize: T must be positive");
  if (!u0.all_finite()) throw std::domain_error("similarity_normalize: non-finite field");
  const Grid& g = u0.grid();
  const double root = std::sqrt(T);
  const Grid scaled(g.space_dim(), g.half_extent() / root, g.axis_points());
  const double amp = std::pow(T, params.beta_exp());
  Field z(scaled, u0.components());
  for (int c = 0; c < u0.components(); ++c) {
    for (std::int64_t node = 0; node < g.total_nodes(); ++node) z.at(c, node) = amp * u0.at(c, node);
  }
  return z;
}

}  // namespace pgs
