#pragma once

// Global and local energies of the rescaled flow, discrete residuals of the
// mass and dissipation identities (global and cutoff-localized), and the
// boundedness monitors for every quantity the analysis controls. The energy
// uses the staggered gradient quadrature, so along the divergence-form flow
// dE/ds = -int |W_s|^2 rho holds to roundoff and the monitored bounds can be
// flagged at 1e-8 scale.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pgs/cutoff.hpp"
#include "pgs/grid.hpp"
#include "pgs/nonlinearity.hpp"
#include "pgs/operators.hpp"
#include "pgs/quadrature.hpp"
#include "pgs/selfsimilar.hpp"

namespace pgs {

struct EnergySample {
  double s;
  double E;
  double E_loc;
  double l2rho;
  double w12rho;
  double lp1rho_ball;
  double dissipation;
};

namespace detail {

inline double integral_G(const Field& w, const SystemParams& params) {
  std::vector<double> u(static_cast<std::size_t>(w.components()));
  const QuadratureRegion region(w.grid(), std::nullopt);
  return integrate_rho(region, [&](std::int64_t node) {
    for (int c = 0; c < w.components(); ++c) u[static_cast<std::size_t>(c)] = w.at(c, node);
    return eval_G(u, params);
  });
}

inline double mass_rho(const Field& w) {
  const QuadratureRegion region(w.grid(), std::nullopt);
  return integrate_rho(region, [&](std::int64_t node) {
    const double v = w.node_norm(node);
    return v * v;
  });
}

// Face-staggered gradient sum with an arbitrary nonnegative multiplier
// evaluated at face midpoints (used for the psi^2-weighted local energy).
template <class WeightFn>
double face_gradient_weighted(const Field& f, const WeightFn& weight) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  const int n = g.axis_points();
  const auto face_sum = [&](int axis) {
    const std::int64_t per = n + 1;
    const std::int64_t rows = g.space_dim() == 2 ? n : 1;
    return pairwise_accumulate(0, per * rows, [&](std::int64_t idx) {
      const int k = static_cast<int>(idx % per);   // face index along the axis
      const int o = static_cast<int>(idx / per);   // transversal node index
      std::array<double, 2> mid{};
      if (axis == 0) {
        mid = {g.coord(k) - 0.5 * h, g.space_dim() == 2 ? g.coord(o) : 0.0};
      } else {
        mid = {g.coord(o), g.coord(k) - 0.5 * h};
      }
      const double wgt = weight(mid);
      if (wgt == 0.0) return 0.0;
      const double rho = std::exp(-(mid[0] * mid[0] + mid[1] * mid[1]) / 4.0);
      double sum = 0.0;
      for (int c = 0; c < f.components(); ++c) {
        double lo = 0.0, hi = 0.0;
        if (axis == 0) {
          lo = k > 0 ? f.at(c, g.flat(k - 1, o)) : 0.0;
          hi = k < n ? f.at(c, g.flat(k, o)) : 0.0;
        } else {
          lo = k > 0 ? f.at(c, g.flat(o, k - 1)) : 0.0;
          hi = k < n ? f.at(c, g.flat(o, k)) : 0.0;
        }
        const double d = (hi - lo) / h;
        sum += d * d;
      }
      return wgt * rho * sum;
    });
  };
  double total = face_sum(0);
  if (g.space_dim() == 2) total += face_sum(1);
  const double cell = g.space_dim() == 2 ? h * h : h;
  return total * cell;
}

}  // namespace detail

// E[W] = 1/2 int (|grad W|^2 + beta |W|^2) rho - int G(W) rho.
inline double global_energy(const Field& w, const SystemParams& params) {
  if (!w.all_finite()) throw std::domain_error("global_energy: non-finite field");
  const double beta = params.beta_exp();
  return 0.5 * (face_gradient_energy(w) + beta * detail::mass_rho(w)) - detail::integral_G(w, params);
}

// E_phi[W] with phi^2 node (and face-midpoint) weights.
inline double local_energy(const Field& w, const CutoffProfile& cutoff, const SystemParams& params) {
  if (!w.all_finite()) throw std::domain_error("local_energy: non-finite field");
  const Grid& g = w.grid();
  if (2.0 * cutoff.radius > g.half_extent() * (1.0 + 1e-12))
    throw TruncationError("local_energy: cutoff support exceeds the grid");
  const double beta = params.beta_exp();
  const double grad_term = detail::face_gradient_weighted(w, [&](std::array<double, 2> mid) {
    const double phi = cutoff.value(std::span<const double>(mid.data(), static_cast<std::size_t>(g.space_dim())));
    return phi * phi;
  });
  std::vector<double> u(static_cast<std::size_t>(w.components()));
  const QuadratureRegion region(g, std::nullopt);
  const double mass_term = integrate_rho(region, [&](std::int64_t node) {
    const auto y = g.point(node);
    const double phi = cutoff.value(std::span<const double>(y.data(), static_cast<std::size_t>(g.space_dim())));
    const double v = w.node_norm(node);
    return phi * phi * v * v;
  });
  const double g_term = integrate_rho(region, [&](std::int64_t node) {
    const auto y = g.point(node);
    const double phi = cutoff.value(std::span<const double>(y.data(), static_cast<std::size_t>(g.space_dim())));
    for (int c = 0; c < w.components(); ++c) u[static_cast<std::size_t>(c)] = w.at(c, node);
    return phi * phi * eval_G(u, params);
  });
  return 0.5 * (grad_term + beta * mass_term) - g_term;
}

// Per-frame energy table for a recorded trajectory.
inline std::vector<EnergySample> energy_series(const RescaledTrajectory& traj, const SystemParams& params,
                                               const CutoffProfile& cutoff, double ball_radius) {
  std::vector<EnergySample> out;
  out.reserve(traj.frames.size());
  for (std::size_t k = 0; k < traj.frames.size(); ++k) {
    const Field& w = traj.frames[k];
    EnergySample sample{};
    sample.s = traj.s_at(k);
    sample.E = global_energy(w, params);
    sample.E_loc = local_energy(w, cutoff, params);
    sample.l2rho = weighted_lebesgue_norm(w, 2.0);
    sample.w12rho = weighted_sobolev_norm(w, params.beta_exp());
    sample.lp1rho_ball = weighted_lebesgue_norm(w, params.p() + 1.0, ball_radius);
    const Field ws = rhs_rescaled_divergence(w, params);
    sample.dissipation = detail::mass_rho(ws);
    out.push_back(sample);
  }
  return out;
}

struct ResidualReport {
  std::vector<std::array<double, 2>> series;  // (s, residual)
  double max_abs = 0.0;
};

namespace detail {

inline void require_checkable(const RescaledTrajectory& traj, const char* what) {
  if (traj.frames.size() < 3)
    throw std::invalid_argument(std::string(what) + ": need at least 3 consecutive frames");
  if (!(traj.ds > 0.0)) throw std::invalid_argument(std::string(what) + ": nonuniform or empty spacing");
}

template <class LhsSeries, class RhsAt>
ResidualReport central_difference_residual(const RescaledTrajectory& traj, const LhsSeries& lhs,
                                           const RhsAt& rhs) {
  ResidualReport report;
  for (std::size_t k = 1; k + 1 < traj.frames.size(); ++k) {
    const double dlhs = (lhs[k + 1] - lhs[k - 1]) / (2.0 * traj.ds);
    const double residual = dlhs - rhs(k);
    report.series.push_back({traj.s_at(k), residual});
    report.max_abs = std::max(report.max_abs, std::fabs(residual));
  }
  return report;
}

}  // namespace detail

// Residual of (1/2) d/ds int |W|^2 rho = -2 E[W] + (p-1) int G(W) rho.
inline ResidualReport check_identity_mass(const RescaledTrajectory& traj, const SystemParams& params) {
  detail::require_checkable(traj, "check_identity_mass");
  std::vector<double> half_mass, rhs_val;
  for (const auto& w : traj.frames) {
    half_mass.push_back(0.5 * detail::mass_rho(w));
    rhs_val.push_back(-2.0 * global_energy(w, params) + (params.p() - 1.0) * detail::integral_G(w, params));
  }
  return detail::central_difference_residual(traj, half_mass, [&](std::size_t k) { return rhs_val[k]; });
}

// Residual of d/ds E[W] = -int |W_s|^2 rho, with W_s evaluated from the
// nodewise rescaled operator (not frame differencing).
inline ResidualReport check_identity_dissipation(const RescaledTrajectory& traj, const SystemParams& params) {
  detail::require_checkable(traj, "check_identity_dissipation");
  std::vector<double> energy, rhs_val;
  for (const auto& w : traj.frames) {
    energy.push_back(global_energy(w, params));
    const Field ws = rhs_rescaled(w, params);
    rhs_val.push_back(-detail::mass_rho(ws));
  }
  return detail::central_difference_residual(traj, energy, [&](std::size_t k) { return rhs_val[k]; });
}

struct LocalIdentityReport {
  ResidualReport mass;         // (3.3)
  ResidualReport dissipation;  // (3.4)
};

inline LocalIdentityReport check_local_identities(const RescaledTrajectory& traj, const CutoffProfile& psi,
                                                  const SystemParams& params) {
  detail::require_checkable(traj, "check_local_identities");
  const Grid& g = traj.frames.front().grid();
  if (2.0 * psi.radius > g.half_extent() * (1.0 + 1e-12))
    throw TruncationError("check_local_identities: cutoff support exceeds the grid");
  const QuadratureRegion region(g, std::nullopt);
  const int dim = g.space_dim();

  const auto psi_at = [&](std::int64_t node) {
    const auto y = g.point(node);
    return psi.value(std::span<const double>(y.data(), static_cast<std::size_t>(dim)));
  };

  std::vector<double> half_mass, mass_rhs, local_e, diss_rhs;
  for (const auto& w : traj.frames) {
    half_mass.push_back(0.5 * integrate_rho(region, [&](std::int64_t node) {
      const double phi = psi_at(node);
      const double v = w.node_norm(node);
      return phi * phi * v * v;
    }));
    local_e.push_back(local_energy(w, psi, params));

    const auto grad_w = gradient(w);
    const Field ws = rhs_rescaled(w, params);
    std::vector<double> u(static_cast<std::size_t>(w.components()));
    const double g_term = integrate_rho(region, [&](std::int64_t node) {
      const double phi = psi_at(node);
      for (int c = 0; c < w.components(); ++c) u[static_cast<std::size_t>(c)] = w.at(c, node);
      return phi * phi * eval_G(u, params);
    });
    const double coupling_mass = integrate_rho(region, [&](std::int64_t node) {
      const auto y = g.point(node);
      const double phi = psi_at(node);
      if (phi == 0.0) return 0.0;
      const auto dpsi = psi.gradient(std::span<const double>(y.data(), static_cast<std::size_t>(dim)));
      double acc = 0.0;
      for (int c = 0; c < w.components(); ++c) {
        double dot = dpsi[0] * grad_w[0].at(c, node);
        if (dim == 2) dot += dpsi[1] * grad_w[1].at(c, node);
        acc += w.at(c, node) * dot;
      }
      return phi * acc;
    });
    mass_rhs.push_back(-2.0 * local_e.back() + (params.p() - 1.0) * g_term - 2.0 * coupling_mass);

    const double psi_diss = integrate_rho(region, [&](std::int64_t node) {
      const double phi = psi_at(node);
      const double v = ws.node_norm(node);
      return phi * phi * v * v;
    });
    const double coupling_diss = integrate_rho(region, [&](std::int64_t node) {
      const auto y = g.point(node);
      const double phi = psi_at(node);
      if (phi == 0.0) return 0.0;
      const auto dpsi = psi.gradient(std::span<const double>(y.data(), static_cast<std::size_t>(dim)));
      double acc = 0.0;
      for (int c = 0; c < w.components(); ++c) {
        double dot = dpsi[0] * grad_w[0].at(c, node);
        if (dim == 2) dot += dpsi[1] * grad_w[1].at(c, node);
        acc += ws.at(c, node) * dot;
      }
      return phi * acc;
    });
    diss_rhs.push_back(-psi_diss - 2.0 * coupling_diss);
  }

  LocalIdentityReport report;
  report.mass = detail::central_difference_residual(traj, half_mass, [&](std::size_t k) { return mass_rhs[k]; });
  report.dissipation =
      detail::central_difference_residual(traj, local_e, [&](std::size_t k) { return diss_rhs[k]; });
  return report;
}

struct Witness {
  double s = 0.0;
  double value = 0.0;
};

// Extrema and pass/fail flags for the quantities bounded by the analysis.
// The non-constructive constants (K_i, L_i, C_{q,R}) are not computed; the
// report carries the corresponding extremum so boundedness is falsifiable.
struct MonitorReport {
  double tolerance = 0.0;
  // (a) energy monotonicity defect and (b) minimum energy
  Witness monotonicity_defect;
  Witness min_energy;
  // (c) cumulative dissipation against E at the window start
  double cumulative_dissipation = 0.0;
  double initial_energy = 0.0;
  // (d) sup of the weighted L2 norm
  Witness sup_l2;
  // (e) sliding-window integral of the whole-space L^{p+1} norm ^ {2(p+1)}
  Witness window_lp1_global;
  // (f) ratio ||W||_{W12}^2 / (1 + ||W_s||_{L2})
  Witness sobolev_ratio;
  // (g) extrema of the local energy
  Witness max_local_energy;
  Witness min_local_energy;
  // (h) sliding windows of (int_{B_R} |W|^{p+1} rho)^q and ||W;W12(B_R)||^{2q}
  Witness window_ball_mass;
  Witness window_ball_sobolev;
  // (i) Jensen lower-bound defect of the differential inequality
  Witness jensen_defect_min;

  bool energy_monotone = false;
  bool energy_nonnegative = false;
  bool dissipation_bounded = false;
  bool jensen_nonnegative = false;
  bool all_pass() const {
    return energy_monotone && energy_nonnegative && dissipation_bounded && jensen_nonnegative;
  }
};

inline MonitorReport monitor_bounds(const RescaledTrajectory& traj, double ball_radius, double q,
                                    const CutoffProfile& cutoff, const SystemParams& params,
                                    const StructureConstants& constants, double tolerance_scale = 1.0) {
  if (traj.span() < 2.0 * (1.0 - 1e-12))
    throw std::invalid_argument("monitor_bounds: trajectory must span at least 2 units of s");
  if (!(q >= 2.0)) throw std::invalid_argument("monitor_bounds: q must be >= 2");
  const std::size_t count = traj.frames.size();
  const double p = params.p();
  const double n_dim = params.space_dim;

  std::vector<double> energy(count), diss(count), l2(count), w12(count), lp1_global(count),
      ball_mass(count), ball_sob(count), e_loc(count), jensen(count);
  const double c1 = (p - 1.0) * constants.c_G * std::pow(4.0 * 3.14159265358979323846, -n_dim * (p - 1.0) / 4.0);
  for (std::size_t k = 0; k < count; ++k) {
    const Field& w = traj.frames[k];
    energy[k] = global_energy(w, params);
    const Field ws = rhs_rescaled_divergence(w, params);
    diss[k] = detail::mass_rho(ws);
    l2[k] = weighted_lebesgue_norm(w, 2.0);
    w12[k] = weighted_sobolev_norm(w, params.beta_exp());
    lp1_global[k] = weighted_lebesgue_norm(w, p + 1.0);
    const double ball_p1 = std::pow(weighted_lebesgue_norm(w, p + 1.0, ball_radius), p + 1.0);
    ball_mass[k] = ball_p1;
    ball_sob[k] = weighted_sobolev_norm(w, params.beta_exp(), ball_radius);
    e_loc[k] = local_energy(w, cutoff, params);
    jensen[k] = (p - 1.0) * detail::integral_G(w, params) - c1 * std::pow(l2[k] * l2[k], (p + 1.0) / 2.0);
  }

  MonitorReport report;
  report.initial_energy = energy.front();
  const double scale = std::max(1.0, std::fabs(energy.front()));
  report.tolerance = 1e-8 * scale * tolerance_scale;

  double running_min = energy.front();
  for (std::size_t k = 0; k < count; ++k) {
    const double s = traj.s_at(k);
    const double defect = energy[k] - running_min;
    if (defect > report.monotonicity_defect.value) report.monotonicity_defect = {s, defect};
    running_min = std::min(running_min, energy[k]);
    if (k == 0 || energy[k] < report.min_energy.value) report.min_energy = {s, energy[k]};
    if (k == 0 || l2[k] > report.sup_l2.value) report.sup_l2 = {s, l2[k]};
    const double ratio = w12[k] * w12[k] / (1.0 + std::sqrt(diss[k]));
    if (k == 0 || ratio > report.sobolev_ratio.value) report.sobolev_ratio = {s, ratio};
    if (k == 0 || e_loc[k] > report.max_local_energy.value) report.max_local_energy = {s, e_loc[k]};
    if (k == 0 || e_loc[k] < report.min_local_energy.value) report.min_local_energy = {s, e_loc[k]};
    if (k == 0 || jensen[k] < report.jensen_defect_min.value) report.jensen_defect_min = {s, jensen[k]};
  }

  // trapezoidal cumulative dissipation over the whole recorded run
  double cum = 0.0;
  for (std::size_t k = 0; k + 1 < count; ++k) cum += 0.5 * (diss[k] + diss[k + 1]) * traj.ds;
  report.cumulative_dissipation = cum;

  // sliding unit windows
  const auto window_max = [&](const std::vector<double>& series, double exponent) {
    Witness best{traj.s_at(0), -std::numeric_limits<double>::infinity()};
    const auto per_window = static_cast<std::size_t>(std::llround(1.0 / traj.ds));
    if (per_window + 1 > count)
      throw std::invalid_argument("monitor_bounds: unit window exceeds the trajectory");
    for (std::size_t k = 0; k + per_window < count; ++k) {
      double acc = 0.0;
      for (std::size_t j = k; j < k + per_window; ++j)
        acc += 0.5 * (std::pow(series[j], exponent) + std::pow(series[j + 1], exponent)) * traj.ds;
      if (acc > best.value) best = {traj.s_at(k), acc};
    }
    return best;
  };
  report.window_lp1_global = window_max(lp1_global, 2.0 * (p + 1.0));
  report.window_ball_mass = window_max(ball_mass, q);
  report.window_ball_sobolev = window_max(ball_sob, 2.0 * q);

  report.energy_monotone = report.monotonicity_defect.value <= report.tolerance;
  report.energy_nonnegative = report.min_energy.value >= -report.tolerance;
  report.dissipation_bounded = cum <= energy.front() + report.tolerance;
  report.jensen_nonnegative = report.jensen_defect_min.value >= -report.tolerance;
  return report;
}

// Max over sampled centers of the initial rescaled energy, Remark-style crude
// bound alongside: E <= 1/2 int rho * (T^{2 beta + 1} sup|grad U0|^2 +
// beta T^{2 beta} sup|U0|^2).
inline double initial_energy_bound(const Field& u0, const std::vector<std::array<double, 2>>& centers,
                                   double T, const SystemParams& params, const Grid& y_grid) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& a : centers) {
    const auto frame = to_selfsimilar(u0, 0.0, a, T, params, y_grid);
    worst = std::max(worst, global_energy(frame.W, params));
  }
  return worst;
}

inline double crude_initial_energy_bound(const Field& u0, double T, const SystemParams& params) {
  const double beta = params.beta_exp();
  double sup_u = 0.0, sup_grad = 0.0;
  const auto grads = gradient(u0);
  for (std::int64_t node = 0; node < u0.nodes(); ++node) {
    sup_u = std::max(sup_u, u0.node_norm(node));
    double g2 = 0.0;
    for (const auto& gf : grads) {
      const double v = gf.node_norm(node);
      g2 += v * v;
    }
    sup_grad = std::max(sup_grad, g2);
  }
  const QuadratureRegion region(u0.grid(), std::nullopt);
  const double rho_mass = integrate_rho(region, [&](std::int64_t) { return 1.0; });
  return 0.5 * rho_mass *
         (std::pow(T, 2.0 * beta + 1.0) * sup_grad + beta * std::pow(T, 2.0 * beta) * sup_u * sup_u);
}

}  // namespace pgs
