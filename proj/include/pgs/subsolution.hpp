#pragma once

// The aggregate w = sum_i |w_i| and the check that it is a subsolution of the
// scalar majorant equation: pointwise on the region where every component is
// bounded away from zero, and in weak form against a family of nonnegative
// smooth bumps with the second-order terms moved onto the test function.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pgs/cutoff.hpp"
#include "pgs/grid.hpp"
#include "pgs/nonlinearity.hpp"
#include "pgs/operators.hpp"
#include "pgs/quadrature.hpp"
#include "pgs/selfsimilar.hpp"

namespace pgs {

inline ScalarField aggregate_w(const Field& w) {
  if (!w.all_finite()) throw std::domain_error("aggregate_w: non-finite field");
  Field out(w.grid(), 1);
  for (std::int64_t node = 0; node < w.nodes(); ++node) {
    double acc = 0.0;
    for (int c = 0; c < w.components(); ++c) acc += std::fabs(w.at(c, node));
    out.at(0, node) = acc;
  }
  return ScalarField(std::move(out));
}

struct SubsolutionTestBump {
  std::array<double, 2> center{0.0, 0.0};
  double radius = 1.0;
};

inline std::vector<SubsolutionTestBump> default_test_bumps(const Grid& grid) {
  // 9 translated, dilated copies of the cutoff profile; every support stays
  // well inside the grid
  const double L = grid.half_extent();
  std::vector<SubsolutionTestBump> bumps;
  const std::array<double, 3> centers{-0.25 * L, 0.0, 0.25 * L};
  const std::array<double, 3> radii{L / 16.0, L / 8.0, L / 4.0};
  for (double c : centers)
    for (double r : radii) bumps.push_back({{c, 0.0}, r});
  return bumps;
}

struct SubsolutionWitness {
  double s = 0.0;
  std::array<double, 2> point{0.0, 0.0};
  double value = -std::numeric_limits<double>::infinity();
};

struct SubsolutionReport {
  bool mask_empty = true;
  std::int64_t masked_nodes = 0;
  double delta = 0.0;
  SubsolutionWitness pointwise_max;        // max of the masked pointwise residual
  std::vector<double> weak_residuals;      // one per test bump, normalized by int zeta rho
  double weak_max = -std::numeric_limits<double>::infinity();
  int weak_max_bump = -1;
  double weak_max_s = 0.0;
};

// Residual of the scalar inequality d_s w <= Delta w - (1/2) y.grad w
// - beta w + (sum_ij beta_ij) w^p.  Reported as
// r = d_s w - Delta w + (1/2) y.grad w + beta w - (sum beta) w^p, expected
// nonpositive up to discretization. The mask keeps nodes where every
// component exceeds delta in magnitude, away from the kinks of |w_i|.
inline SubsolutionReport subsolution_residual(const RescaledTrajectory& traj, const SystemParams& params,
                                              double delta,
                                              const std::vector<SubsolutionTestBump>& bumps) {
  if (traj.frames.size() < 3)
    throw std::invalid_argument("subsolution_residual: need at least 3 consecutive frames");
  if (!(delta > 0.0)) throw std::invalid_argument("subsolution_residual: delta must be positive");
  const Grid& g = traj.frames.front().grid();
  const int dim = g.space_dim();
  const double beta = params.beta_exp();
  const double coupling_sum = params.coupling.total_sum();
  const double p = params.p();

  SubsolutionReport report;
  report.delta = delta;
  report.weak_residuals.assign(bumps.size(), -std::numeric_limits<double>::infinity());

  std::vector<Field> aggregates;
  aggregates.reserve(traj.frames.size());
  for (const auto& w : traj.frames) aggregates.push_back(aggregate_w(w).field());

  const QuadratureRegion region(g, std::nullopt);
  for (std::size_t k = 1; k + 1 < traj.frames.size(); ++k) {
    const Field& w = traj.frames[k];
    const Field& agg = aggregates[k];
    Field dsw(g, 1);
    for (std::int64_t node = 0; node < g.total_nodes(); ++node)
      dsw.at(0, node) = (aggregates[k + 1].at(0, node) - aggregates[k - 1].at(0, node)) / (2.0 * traj.ds);
    const Field lap = laplacian_dirichlet(agg);
    const Field drift = half_drift_dirichlet(agg);

    // pointwise residual on the mask, interior nodes only
    for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
      if (!g.is_interior(node, 2)) continue;
      bool masked_in = true;
      for (int c = 0; c < w.components(); ++c)
        if (std::fabs(w.at(c, node)) <= delta) masked_in = false;
      if (!masked_in) continue;
      ++report.masked_nodes;
      report.mask_empty = false;
      const double a = agg.at(0, node);
      const double r = dsw.at(0, node) - lap.at(0, node) + drift.at(0, node) + beta * a -
                       coupling_sum * std::pow(a, p);
      if (r > report.pointwise_max.value) {
        report.pointwise_max.value = r;
        report.pointwise_max.s = traj.s_at(k);
        report.pointwise_max.point = g.point(node);
      }
    }

    // weak residual: int (d_s w) zeta rho + int grad w . grad zeta rho
    // + beta int w zeta rho - (sum beta) int w^p zeta rho, per unit of
    // int zeta rho. Second derivatives never touch the kinked aggregate.
    const auto grad_agg = gradient(agg);
    for (std::size_t b = 0; b < bumps.size(); ++b) {
      const CutoffProfile zeta(bumps[b].radius);
      if (2.0 * bumps[b].radius + std::fabs(bumps[b].center[0]) > g.half_extent() ||
          (dim == 2 && 2.0 * bumps[b].radius + std::fabs(bumps[b].center[1]) > g.half_extent()))
        throw TruncationError("subsolution_residual: test bump support exceeds the grid");
      const auto zeta_parts = [&](std::int64_t node, double* value, std::array<double, 2>* grad) {
        const auto y = g.point(node);
        const std::array<double, 2> rel{y[0] - bumps[b].center[0], y[1] - bumps[b].center[1]};
        const std::span<const double> rel_span(rel.data(), static_cast<std::size_t>(dim));
        *value = zeta.value(rel_span);
        *grad = zeta.gradient(rel_span);
      };
      const double mass = integrate_rho(region, [&](std::int64_t node) {
        double z;
        std::array<double, 2> dz;
        zeta_parts(node, &z, &dz);
        return z;
      });
      const double weak = integrate_rho(region, [&](std::int64_t node) {
        double z;
        std::array<double, 2> dz;
        zeta_parts(node, &z, &dz);
        if (z == 0.0 && dz[0] == 0.0 && dz[1] == 0.0) return 0.0;
        const double a = agg.at(0, node);
        double grad_dot = dz[0] * grad_agg[0].at(0, node);
        if (dim == 2) grad_dot += dz[1] * grad_agg[1].at(0, node);
        return dsw.at(0, node) * z + grad_dot + beta * a * z - coupling_sum * std::pow(a, p) * z;
      });
      const double normalized = weak / mass;
      if (normalized > report.weak_residuals[b]) report.weak_residuals[b] = normalized;
      if (normalized > report.weak_max) {
        report.weak_max = normalized;
        report.weak_max_bump = static_cast<int>(b);
        report.weak_max_s = traj.s_at(k);
      }
    }
  }
  return report;
}

inline SubsolutionReport subsolution_residual(const RescaledTrajectory& traj, const SystemParams& params,
                                              double delta) {
  return subsolution_residual(traj, params, delta, default_test_bumps(traj.frames.front().grid()));
}

}  // namespace pgs
