#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pgs/initial_data.hpp"
#include "pgs/physical.hpp"
#include "pgs/energy.hpp"
#include "pgs/selfsimilar.hpp"

using namespace pgs;

namespace {

SystemParams scalar_cubic() { return SystemParams(1, 1, 1.0, CouplingMatrix::all_ones(1)); }
SystemParams pair_all_ones() { return SystemParams(1, 2, 1.0, CouplingMatrix::all_ones(2)); }

}  // namespace

TEST_CASE("constant fixed points of the rescaled flow") {
  CHECK(kappa_constant(scalar_cubic())[0] == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  const auto k2 = kappa_constant(pair_all_ones());
  CHECK(k2[0] == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(k2[1] == Catch::Approx(0.5).epsilon(1e-15));
  const SystemParams quadratic(1, 1, 0.5, CouplingMatrix::all_ones(1));  // p = 2, beta = 1
  CHECK(kappa_constant(quadratic)[0] == Catch::Approx(1.0).epsilon(1e-15));

  const SystemParams uneven(1, 2, 1.0, CouplingMatrix(2, {1.0, 0.5, 0.5, 2.0}));
  CHECK_THROWS_AS(kappa_constant(uneven), std::domain_error);
}

TEST_CASE("rescaled rhs vanishes at the fixed point") {
  for (const auto& params : {scalar_cubic(), pair_all_ones()}) {
    const Grid g(1, 10.0, 201);
    const Field w = kappa_field(g, params);
    const Field rhs = rhs_rescaled(w, params);
    double worst = 0.0;
    for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
      if (!g.is_interior(node)) continue;
      for (int c = 0; c < w.components(); ++c) worst = std::max(worst, std::fabs(rhs.at(c, node)));
    }
    CHECK(worst <= 1e-10);
  }
  const Field zero(Grid(1, 10.0, 201), 1);
  const Field rhs0 = rhs_rescaled(zero, scalar_cubic());
  CHECK(sup_norm(rhs0) == 0.0);
}

TEST_CASE("the two discrete forms of the rescaled operator agree at second order") {
  const auto params = scalar_cubic();
  const auto mismatch = [&](int n) {
    const Grid g(1, 10.0, n);
    Field w(g, 1);
    for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
      const double y = g.point(node)[0];
      w.at(0, node) = 0.7 + 0.3 * std::cos(y) * std::exp(-y * y / 10.0);
    }
    const Field a = rhs_rescaled(w, params);
    const Field b = rhs_rescaled_divergence(w, params);
    double worst = 0.0;
    for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
      if (g.boundary_distance(node) < 2) continue;
      worst = std::max(worst, std::fabs(a.at(0, node) - b.at(0, node)));
    }
    return worst;
  };
  const double coarse = mismatch(161);
  const double fine = mismatch(321);
  CHECK(coarse / fine >= 3.5);
}

TEST_CASE("transform to self-similar variables") {
  const auto params = scalar_cubic();
  const Grid xg(1, 8.0, 257);
  const Grid yg(1, 6.0, 193);

  // unit gap: W = U, s = 0
  const auto frame = to_selfsimilar(constant_field(xg, {0.7}), 0.0, {0.0, 0.0}, 1.0, params, yg);
  CHECK(frame.s == 0.0);
  for (std::int64_t node = 0; node < yg.total_nodes(); ++node)
    CHECK(frame.W.at(0, node) == Catch::Approx(0.7).epsilon(1e-14));

  // the exact scalar ODE solution maps to the constant profile for every s
  const double T = 0.5;
  for (double t : {0.0, 0.2, 0.4}) {
    const double u = std::pow(2.0 * (T - t), -0.5);
    const auto f = to_selfsimilar(constant_field(xg, {u}), t, {0.3, 0.0}, T, params, yg);
    for (std::int64_t node = 0; node < yg.total_nodes(); ++node)
      CHECK(f.W.at(0, node) == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
  }

  CHECK_THROWS_AS(to_selfsimilar(constant_field(xg, {1.0}), 0.6, {0.0, 0.0}, 0.5, params, yg),
                  std::invalid_argument);
  // image points fall outside the physical grid for a large off-center frame
  CHECK_THROWS_AS(to_selfsimilar(constant_field(xg, {1.0}), 0.0, {7.5, 0.0}, 1.5, params, yg),
                  TruncationError);
}

TEST_CASE("transform back from self-similar variables") {
  const auto params = scalar_cubic();
  const Grid xg(1, 8.0, 257);
  const Grid yg(1, 6.0, 193);

  // W = kappa at rescaled time s: U = kappa e^{s/(p-1)}
  const double s = std::log(4.0);
  const SelfSimilarFrame frame({0.0, 0.0}, 1.0, s, constant_field(yg, {1.0}));
  const auto [u, t] = from_selfsimilar(frame, params, Grid(1, 2.0, 65));
  CHECK(t == Catch::Approx(1.0 - 0.25).epsilon(1e-14));
  for (std::int64_t node = 0; node < 65; ++node) CHECK(u.at(0, node) == Catch::Approx(2.0).epsilon(1e-13));

  const SelfSimilarFrame zero({0.0, 0.0}, 1.0, 0.3, Field(yg, 1));
  const auto [u0, t0] = from_selfsimilar(zero, params, Grid(1, 2.0, 65));
  CHECK(sup_norm(u0) == 0.0);

  // round trip on a bump
  const Field bump = gaussian_bump_field(xg, {1.3}, 1.5);
  const auto fwd = to_selfsimilar(bump, 0.3, {0.5, 0.0}, 1.0, params, yg);
  const auto [back, tb] = from_selfsimilar(fwd, params, Grid(1, 3.0, 97));
  CHECK(tb == Catch::Approx(0.3).epsilon(1e-14));
  const double hy = yg.spacing();
  for (std::int64_t node = 0; node < back.nodes(); ++node) {
    const double x = back.grid().point(node)[0];
    const double expect = 1.3 * std::exp(-x * x / (1.5 * 1.5));
    CHECK(back.at(0, node) == Catch::Approx(expect).margin(4.0 * hy * hy));
  }
}

TEST_CASE("center covariance of the transform") {
  const auto params = scalar_cubic();
  const Grid xg(1, 8.0, 257);
  const Grid yg(1, 4.0, 129);
  const double shift = 16.0 * xg.spacing();  // translation by a whole number of cells

  Field centered = gaussian_bump_field(xg, {1.1}, 1.0);
  Field translated(xg, 1);
  for (std::int64_t node = 0; node < xg.total_nodes(); ++node) {
    const double x = xg.point(node)[0];
    translated.at(0, node) = 1.1 * std::exp(-(x - shift) * (x - shift) / 1.0);
  }
  const auto f0 = to_selfsimilar(centered, 0.2, {0.0, 0.0}, 1.0, params, yg);
  const auto fa = to_selfsimilar(translated, 0.2, {shift, 0.0}, 1.0, params, yg);
  for (std::int64_t node = 0; node < yg.total_nodes(); ++node)
    CHECK(fa.W.at(0, node) == Catch::Approx(f0.W.at(0, node)).margin(1e-12));
}

TEST_CASE("rescaled stepping holds the fixed point in the bulk") {
  const auto params = pair_all_ones();
  const Grid g(1, 12.0, 241);
  const double ds = 0.004;
  SelfSimilarFrame frame({0.0, 0.0}, 1.0, 0.0, kappa_field(g, params));
  for (int k = 0; k < 250; ++k) frame = step_rescaled(frame, ds, params);
  // nodes outside the boundary influence cone stay at kappa; contamination
  // from the truncation layer decays rapidly going inward
  double worst_mid = 0.0, worst_core = 0.0;
  for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
    const double y2 = g.point(node)[0] * g.point(node)[0];
    for (int c = 0; c < 2; ++c) {
      const double dev = std::fabs(frame.W.at(c, node) - 0.5);
      if (y2 <= 64.0) worst_mid = std::max(worst_mid, dev);   // |y| <= 8
      if (y2 <= 16.0) worst_core = std::max(worst_core, dev);  // |y| <= 4
    }
  }
  CHECK(worst_mid <= 1e-8);
  CHECK(worst_core <= 1e-10);

  SelfSimilarFrame zero({0.0, 0.0}, 1.0, 0.0, Field(g, 2));
  const auto z1 = step_rescaled(zero, ds, params);
  CHECK(sup_norm(z1.W) == 0.0);

  CHECK_THROWS_AS(step_rescaled(frame, 1.0, params), std::invalid_argument);  // unstable ds
}

TEST_CASE("two-dimensional rescaled flow holds the fixed point") {
  const SystemParams params(2, 1, 1.0, CouplingMatrix::all_ones(1));
  const Grid g(2, 10.0, 101);  // h = 0.2
  // E[kappa] in 2D carries the full Gaussian mass (4 pi)
  const double expect = (1.0 / 16.0) * 4.0 * M_PI;
  const Field kappa = kappa_field(g, params);
  CHECK(global_energy(kappa, params) == Catch::Approx(expect).margin(1e-4));

  const Field rhs = rhs_rescaled(kappa, params);
  double worst = 0.0;
  for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
    if (!g.is_interior(node)) continue;
    worst = std::max(worst, std::fabs(rhs.at(0, node)));
  }
  CHECK(worst <= 1e-10);

  SelfSimilarFrame frame({0.0, 0.0}, 1.0, 0.0, kappa);
  const double ds = 0.8 * rescaled_stability_ds(g, params);
  double prev_e = global_energy(frame.W, params);
  for (int k = 0; k < 40; ++k) {
    frame = step_rescaled(frame, ds, params);
    const double e = global_energy(frame.W, params);
    CHECK(e <= prev_e + 1e-10);
    prev_e = e;
  }
  for (std::int64_t node = 0; node < g.total_nodes(); ++node) {
    if (g.radius_sq(node) > 36.0) continue;  // |y| <= 6
    CHECK(std::fabs(frame.W.at(0, node) - kappa.at(0, node)) <= 1e-9);
  }
}

TEST_CASE("physical and rescaled evolutions are consistent over a unit s interval") {
  const auto params = scalar_cubic();

  // reference blow-up time from the finest resolution, shared by both levels
  const double T = [&] {
    const Grid xg(1, 12.0, 481);
    SolveControls probe;
    probe.dt_init = 1.0;
    probe.t_max = 2.0;
    const auto run = run_to_blowup(gaussian_bump_field(xg, {1.35}, 2.0), params, probe);
    REQUIRE(run.estimate.has_value());
    return run.estimate->T_est;
  }();

  const auto deviation = [&](int nx, int ny, double dt, double ds) {
    const Grid xg(1, 12.0, nx);
    const Grid yg(1, 10.0, ny);
    const Field u0 = gaussian_bump_field(xg, {1.35}, 2.0);

    const double gap_a = 0.25;
    const double gap_b = gap_a / std::exp(1.0);
    REQUIRE(T > gap_a);

    // integrate the physical problem with a fixed step chosen to land exactly
    // on both comparison times
    const double t_a = T - gap_a;
    const double t_b = T - gap_b;
    PhysicalState state(0.0, u0);
    const auto advance_to = [&](double target) {
      while (state.t < target - 1e-12) {
        const double remaining = target - state.t;
        state = step(state, std::min(dt, remaining), params);
      }
    };
    advance_to(t_a);
    auto frame = to_selfsimilar(state.U, state.t, {0.0, 0.0}, T, params, yg);
    advance_to(t_b);
    const auto frame_b = to_selfsimilar(state.U, state.t, {0.0, 0.0}, T, params, yg);

    const auto steps = static_cast<int>(std::llround(1.0 / ds));
    for (int k = 0; k < steps; ++k) frame = step_rescaled(frame, 1.0 / steps, params);

    double worst = 0.0;
    for (std::int64_t node = 0; node < yg.total_nodes(); ++node) {
      if (yg.point(node)[0] * yg.point(node)[0] > 16.0) continue;  // compare on |y| <= 4
      worst = std::max(worst, std::fabs(frame.W.at(0, node) - frame_b.W.at(0, node)));
    }
    return worst;
  };

  const double coarse = deviation(241, 201, 8e-4, 2e-3);
  const double fine = deviation(481, 401, 4e-4, 1e-3);
  CHECK(fine <= coarse / 1.7);
  CHECK(coarse <= 0.02);
}
