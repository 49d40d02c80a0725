#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pgs/initial_data.hpp"
#include "pgs/physical.hpp"

using namespace pgs;

namespace {

SystemParams scalar_cubic(int n_dim = 1) { return SystemParams(n_dim, 1, 1.0, CouplingMatrix::all_ones(1)); }
SystemParams pair_all_ones() { return SystemParams(1, 2, 1.0, CouplingMatrix::all_ones(2)); }

// u' = u^p with u(0) = u0 blows up at T = u0^{1-p}/(p-1); closed-form solution
double ode_exact(double u0, double p, double t) {
  return std::pow(std::pow(u0, 1.0 - p) - (p - 1.0) * t, -1.0 / (p - 1.0));
}

Trajectory synthetic_ode_trajectory(double p, double T, int samples) {
  // exact type-I trajectory u = ((p-1)(T-t))^{-1/(p-1)} sampled so that T - t
  // sweeps several decades geometrically
  Trajectory traj;
  const double gap0 = T;
  const double gap1 = T * 1e-4;
  for (int k = 0; k < samples; ++k) {
    const double gap = gap0 * std::pow(gap1 / gap0, static_cast<double>(k) / (samples - 1));
    const double u = std::pow((p - 1.0) * gap, -1.0 / (p - 1.0));
    traj.points.push_back({T - gap, u, 0.0});
  }
  return traj;
}

}  // namespace

TEST_CASE("rhs in physical variables") {
  const auto params = scalar_cubic();
  const Grid g(1, 8.0, 129);

  const PhysicalState zero(0.0, Field(g, 1));
  const Field rhs0 = rhs_physical(zero, params);
  for (std::int64_t node = 0; node < g.total_nodes(); ++node) CHECK(rhs0.at(0, node) == 0.0);

  // constant interior: Laplacian vanishes, leaving F(c) = c^3
  const PhysicalState constant(0.0, constant_field(g, {1.5}));
  const Field rhs_c = rhs_physical(constant, params);
  for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
    if (!g.is_interior(node)) continue;
    CHECK(rhs_c.at(0, node) == Catch::Approx(1.5 * 1.5 * 1.5).epsilon(1e-13));
  }

  // u = sin x: rhs = -sin x + sin^3 x up to O(h^2)
  Field wave(g, 1);
  for (std::int64_t node = 0; node < g.total_nodes(); ++node) wave.at(0, node) = std::sin(g.point(node)[0]);
  const Field rhs_w = rhs_physical(PhysicalState(0.0, wave), params);
  const double h = g.spacing();
  for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
    if (!g.is_interior(node, 2)) continue;
    const double x = g.point(node)[0];
    const double expect = -std::sin(x) + std::pow(std::sin(x), 3.0);
    CHECK(rhs_w.at(0, node) == Catch::Approx(expect).margin(h * h));
  }
}

TEST_CASE("scaling equivariance of the reaction on constants") {
  const auto params = scalar_cubic();
  const Grid g(1, 8.0, 129);
  const double lambda = 1.7;
  const double scale = std::pow(lambda, 2.0 / (params.p() - 1.0));
  const Field base = constant_field(g, {0.8});
  const Field scaled = constant_field(g, {0.8 * scale});
  const Field rhs_b = rhs_physical(PhysicalState(0.0, base), params);
  const Field rhs_s = rhs_physical(PhysicalState(0.0, scaled), params);
  const double expected_factor = std::pow(lambda, 2.0 / (params.p() - 1.0) + 2.0);
  for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
    if (!g.is_interior(node)) continue;
    CHECK(rhs_s.at(0, node) == Catch::Approx(expected_factor * rhs_b.at(0, node)).epsilon(1e-12));
  }
}

TEST_CASE("single step matches the scalar closed form in ODE mode") {
  const auto params = scalar_cubic();
  const Grid g(1, 8.0, 129);
  const PhysicalState zero(0.0, Field(g, 1));
  const auto z1 = step(zero, 1e-3, params, /*ode_mode=*/true);
  CHECK(sup_norm(z1.U) == 0.0);

  const double dt = 1e-4;
  const auto next = step(PhysicalState(0.0, constant_field(g, {1.0})), dt, params, true);
  const double exact = ode_exact(1.0, 3.0, dt);
  CHECK(std::fabs(next.U.at(0, 5) - exact) <= 1e-14);  // one-step error is O(dt^5)

  CHECK_THROWS_AS(step(zero, -1.0, params, true), std::invalid_argument);
  CHECK_THROWS_AS(step(zero, 1.0, params, false), std::invalid_argument);  // above the CFL limit
}

TEST_CASE("global ODE-mode error is fourth order before the final decade") {
  const auto params = scalar_cubic();
  const Grid g(1, 8.0, 129);
  const auto run_error = [&](double dt) {
    PhysicalState state(0.0, constant_field(g, {1.0}));
    const int steps = static_cast<int>(std::llround(0.4 / dt));
    for (int k = 0; k < steps; ++k) state = step(state, dt, params, true);
    return std::fabs(state.U.at(0, 0) - ode_exact(1.0, 3.0, state.t));
  };
  const double coarse = run_error(2e-3);
  const double fine = run_error(1e-3);
  CHECK(coarse / fine >= 10.0);  // target order 4 gives 16
}

TEST_CASE("small data decays in the heat-dominated regime") {
  const auto params = scalar_cubic();
  const Grid g(1, 8.0, 257);
  const Field u0 = gaussian_bump_field(g, {0.01}, 1.0);
  const double dt = 0.8 * g.spacing() * g.spacing() / 2.0;
  PhysicalState state(0.0, u0);
  double prev = sup_norm(state.U);
  for (int k = 0; k < 20; ++k) {
    state = step(state, dt, params);
    const double now = sup_norm(state.U);
    CHECK(now <= prev * (1.0 + 1e-12));
    prev = now;
  }
}

TEST_CASE("ODE blow-up times match the closed forms") {
  SolveControls controls;
  controls.dt_init = 1e-3;
  controls.t_max = 2.0;
  controls.ode_mode = true;

  const Grid g(1, 8.0, 129);
  const auto run1 = run_to_blowup(constant_field(g, {1.0}), scalar_cubic(), controls);
  REQUIRE(run1.outcome == BlowupOutcome::blowup);
  REQUIRE(run1.estimate.has_value());
  CHECK(run1.estimate->T_est == Catch::Approx(0.5).epsilon(0.01));
  CHECK(run1.estimate->window_hi < run1.estimate->T_est);

  const auto run2 = run_to_blowup(constant_field(g, {1.0, 1.0}), pair_all_ones(), controls);
  REQUIRE(run2.outcome == BlowupOutcome::blowup);
  CHECK(run2.estimate->T_est == Catch::Approx(0.25).epsilon(0.01));
}

TEST_CASE("zero data never blows up") {
  SolveControls controls;
  controls.dt_init = 1e-2;
  controls.t_max = 0.5;
  controls.ode_mode = true;
  const Grid g(1, 8.0, 129);
  const auto run = run_to_blowup(Field(g, 1), scalar_cubic(), controls);
  CHECK(run.outcome == BlowupOutcome::no_blowup_detected);
  CHECK_FALSE(run.estimate.has_value());
}

TEST_CASE("pointwise larger data never blows up later in ODE mode") {
  SolveControls controls;
  controls.dt_init = 1e-3;
  controls.t_max = 2.0;
  controls.ode_mode = true;
  const Grid g(1, 8.0, 129);
  double prev = 1e9;
  for (double amp : {0.9, 1.0, 1.3, 2.0}) {
    const auto run = run_to_blowup(constant_field(g, {amp}), scalar_cubic(), controls);
    REQUIRE(run.estimate.has_value());
    CHECK(run.estimate->T_est <= prev * (1.0 + 1e-9));
    prev = run.estimate->T_est;
  }
}

TEST_CASE("PDE blow-up time is stable under grid refinement") {
  SolveControls controls;
  controls.dt_init = 1.0;  // capped by the CFL limit
  controls.t_max = 2.0;
  const auto estimate = [&](int n) {
    const Grid g(1, 8.0, n);
    const auto run = run_to_blowup(gaussian_bump_field(g, {3.0}, 1.0), scalar_cubic(), controls);
    REQUIRE(run.outcome == BlowupOutcome::blowup);
    REQUIRE(run.estimate.has_value());
    return run.estimate->T_est;
  };
  const double coarse = estimate(257);
  const double fine = estimate(513);
  CHECK(std::fabs(coarse - fine) <= 0.02 * fine);
}

TEST_CASE("rate fit recovers the exponent on exact trajectories") {
  const auto p3 = synthetic_ode_trajectory(3.0, 0.5, 400);
  const auto fit3 = fit_rate(p3, 0.5, scalar_cubic());
  CHECK(fit3.exponent == Catch::Approx(0.5).margin(1e-3));
  CHECK(fit3.plateau == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-3));
  CHECK(fit3.misfit <= 1e-10);

  const SystemParams quadratic(1, 1, 0.5, CouplingMatrix::all_ones(1));  // p = 2
  const auto p2 = synthetic_ode_trajectory(2.0, 0.5, 400);
  const auto fit2 = fit_rate(p2, 0.5, quadratic);
  CHECK(fit2.exponent == Catch::Approx(1.0).margin(1e-3));

  // window too narrow: only half a decade of gap
  Trajectory narrow;
  for (int k = 0; k < 50; ++k) {
    const double gap = 0.5 - 0.001 * k;
    narrow.points.push_back({0.5 - gap, std::pow(2.0 * gap, -0.5), 0.0});
  }
  CHECK_THROWS_AS(fit_rate(narrow, 0.5, scalar_cubic()), std::invalid_argument);
}

TEST_CASE("solver trajectory fits the type-I rate in ODE mode") {
  SolveControls controls;
  controls.dt_init = 1e-3;
  controls.t_max = 2.0;
  controls.ode_mode = true;
  const Grid g(1, 8.0, 129);
  const auto run = run_to_blowup(constant_field(g, {1.0}), scalar_cubic(), controls);
  REQUIRE(run.estimate.has_value());
  const auto fit = fit_rate(run.trajectory, run.estimate->T_est, scalar_cubic());
  CHECK(fit.exponent == Catch::Approx(0.5).margin(1e-3));
  CHECK(fit.plateau == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-3));
}

TEST_CASE("symmetric components stay identical through the full solver") {
  const auto params = pair_all_ones();
  const Grid g(1, 8.0, 129);
  const Field u0 = gaussian_bump_field(g, {0.5, 0.5}, 1.0);
  const double dt = 0.8 * g.spacing() * g.spacing() / 2.0;
  PhysicalState state(0.0, u0);
  for (int k = 0; k < 40; ++k) state = step(state, dt, params);
  for (std::int64_t node = 0; node < g.total_nodes(); ++node)
    CHECK(state.U.at(0, node) == state.U.at(1, node));
}

TEST_CASE("snapshot cadence") {
  SolveControls controls;
  controls.dt_init = 1e-2;
  controls.t_max = 2.0;
  controls.ode_mode = true;
  controls.snapshot_stride = 10;
  const Grid g(1, 8.0, 33);
  const auto run = run_to_blowup(constant_field(g, {1.0}), scalar_cubic(), controls);
  REQUIRE(run.trajectory.snapshots.size() >= 2);
  CHECK(run.trajectory.snapshots.front().first == 0.0);
  double prev = -1.0;
  for (const auto& [t, field] : run.trajectory.snapshots) {
    CHECK(t > prev);
    CHECK(field.all_finite());
    prev = t;
  }
}

TEST_CASE("similarity normalization") {
  const auto params = scalar_cubic();
  const Grid g(1, 8.0, 129);
  const Field u = gaussian_bump_field(g, {1.0}, 1.0);

  const Field id = similarity_normalize(u, 1.0, params);
  for (std::int64_t node = 0; node < g.total_nodes(); ++node)
    CHECK(id.at(0, node) == u.at(0, node));
  CHECK(id.grid().half_extent() == 8.0);

  const Field z = similarity_normalize(constant_field(g, {1.25}), 4.0, params);
  CHECK(z.grid().half_extent() == 4.0);  // L / sqrt(T)
  for (std::int64_t node = 0; node < g.total_nodes(); ++node)
    CHECK(z.at(0, node) == Catch::Approx(2.5).epsilon(1e-14));

  // round trip through T and 1/T restores the field and the grid
  const Field fwd = similarity_normalize(u, 4.0, params);
  const Field back = similarity_normalize(fwd, 0.25, params);
  CHECK(back.grid().half_extent() == Catch::Approx(8.0).epsilon(1e-14));
  for (std::int64_t node = 0; node < g.total_nodes(); ++node)
    CHECK(back.at(0, node) == Catch::Approx(u.at(0, node)).margin(1e-14));
}
