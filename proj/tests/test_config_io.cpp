#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pgs/config.hpp"
#include "pgs/energy.hpp"
#include "pgs/initial_data.hpp"
#include "pgs/io.hpp"

using namespace pgs;

namespace {

const char* kSample = R"(# sample experiment
system.space_dim = 1
system.components = 2
system.r = 0.5
system.beta = 1 0.25 ; 0.25 2   # symmetric coupling
grid.half_extent = 10
grid.points_per_axis = 201
solver.dt_init = 2e-4
solver.ode_mode = true
initial.kind = gaussian_bump
initial.amplitude = 3 2.5
monitors.radii = 1 2 4
monitors.q = 2 2.5
seed = 99
)";

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config(kSample);
  CHECK(cfg.space_dim == 1);
  CHECK(cfg.components == 2);
  CHECK(cfg.r == 0.5);
  CHECK(cfg.beta_entries == std::vector<double>{1.0, 0.25, 0.25, 2.0});
  CHECK(cfg.points_per_axis == 201);
  CHECK(cfg.dt_init == 2e-4);
  CHECK(cfg.ode_mode);
  CHECK(cfg.initial_kind == InitialKind::gaussian_bump);
  CHECK(cfg.amplitude == std::vector<double>{3.0, 2.5});
  CHECK(cfg.monitor_radii.size() == 3);
  CHECK(cfg.seed == 99);
  // defaults survive
  CHECK(cfg.sup_threshold == 1e6);
  CHECK(cfg.record_stride == 5);
  const auto params = cfg.system_params();
  CHECK(params.p() == 2.0);
}

TEST_CASE("config rejections carry line numbers") {
  const auto expect_line = [](const std::string& text, int line) {
    try {
      (void)parse_config(text);
      FAIL("expected rejection");
    } catch (const ConfigError& e) {
      CHECK(e.line() == line);
    }
  };
  expect_line("foo\n", 1);                                              // no assignment
  expect_line("seed = 1\nseed = 2\n", 2);                               // duplicate
  expect_line("system.r = abc\n", 1);                                   // not a number
  expect_line("bogus.key = 1\n", 1);                                    // unknown key
  expect_line("# c\nsystem.beta = 1 0.5 ; 0.4 1\nsystem.components = 2\n", 2);  // asymmetric

  CHECK_THROWS_AS(parse_config("grid.points_per_axis = 16\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("system.r = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("initial.kind = tornado\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("monitors.cutoff_radius = 50\n"), ConfigError);
}

TEST_CASE("config round-trip is idempotent") {
  const auto once = serialize_config(parse_config(kSample));
  const auto twice = serialize_config(parse_config(once));
  CHECK(once == twice);
  // and a default-constructed configuration round-trips too
  const ExperimentConfig def;
  ExperimentConfig def_full = def;
  def_full.beta_entries = {1.0};
  const auto text = serialize_config(def_full);
  CHECK(serialize_config(parse_config(text)) == text);
}

TEST_CASE("field files round-trip bit-exactly") {
  const Grid g(2, 4.0, 17);
  Field f(g, 2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (auto& v : f.raw()) v = dist(rng);

  const auto [plain, no_meta] = deserialize_field(serialize_field(f));
  CHECK_FALSE(no_meta.has_value());
  CHECK(plain.grid().space_dim() == 2);
  CHECK(plain.grid().axis_points() == 17);
  CHECK(plain.grid().half_extent() == 4.0);
  REQUIRE(plain.components() == 2);
  for (std::size_t k = 0; k < f.raw().size(); ++k) CHECK(plain.raw()[k] == f.raw()[k]);

  FrameMeta meta;
  meta.center = {0.25, -1.0};
  meta.T = 2.0;
  meta.s = 1.5;
  const auto [framed, got_meta] = deserialize_field(serialize_field(f, meta));
  REQUIRE(got_meta.has_value());
  CHECK(got_meta->center[0] == 0.25);
  CHECK(got_meta->center[1] == -1.0);
  CHECK(got_meta->T == 2.0);
  CHECK(got_meta->s == 1.5);
  for (std::size_t k = 0; k < f.raw().size(); ++k) CHECK(framed.raw()[k] == f.raw()[k]);

  CHECK_THROWS_AS(deserialize_field("not-a-field 1\n"), std::runtime_error);
  CHECK_THROWS_AS(deserialize_field("pgs-field 1\n1 1 33 8\n1.0\n"), std::runtime_error);  // short
}

TEST_CASE("csv layouts") {
  Trajectory traj;
  traj.points.push_back({0.0, 1.0, 0.0});
  traj.points.push_back({0.5, 2.0, 0.125});
  const auto csv = trajectory_csv(traj);
  CHECK(csv.rfind("t,sup_norm,dt\n", 0) == 0);
  CHECK(csv.find("0.5,2,0.125") != std::string::npos);

  std::vector<EnergySample> samples{{0.0, 0.25, 0.125, 1.0, 1.5, 0.5, 0.0}};
  const auto ecsv = energy_csv(samples);
  CHECK(ecsv.rfind("s,E,E_loc,l2rho,w12rho,lp1rho_ball,dissipation\n", 0) == 0);
  CHECK(ecsv.find("0,0.25,0.125,1,1.5,0.5,0") != std::string::npos);
}

TEST_CASE("json writer") {
  Json doc = Json::object();
  doc.set("name", Json::string("x\"y"));
  doc.set("value", Json::number(0.1));
  doc.set("bad", Json::number(-std::numeric_limits<double>::infinity()));
  doc.set("list", Json::array().push(Json::integer(3)).push(Json::boolean(false)).push(Json::null()));
  const std::string text = doc.dump();
  CHECK(text.find("\"x\\\"y\"") != std::string::npos);
  CHECK(text.find("0.10000000000000001") != std::string::npos);  // 17 significant digits
  CHECK(text.find("inf") == std::string::npos);                  // non-finite maps to null
  CHECK(text.find("null") != std::string::npos);
}

TEST_CASE("serialized doubles round-trip") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double x = std::ldexp(dist(rng), static_cast<int>(rng() % 64) - 32);
    CHECK(std::stod(format_double(x)) == x);
  }
}
