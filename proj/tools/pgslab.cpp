// pgslab: experiment runner for the coupled parabolic power system and its
// self-similar rescaling. Subcommands: simulate (physical blow-up run and
// type-I rate fit), rescaled (rescaled flow with energy monitors), verify
// (structure, identity-convergence and subsolution suites), exponents
// (bootstrap exponent schedules), report (aggregate prior outputs).
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration or validation
// rejection, 3 no blow-up detected, 4 verification or monitor failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pgs/bootstrap.hpp"
#include "pgs/config.hpp"
#include "pgs/energy.hpp"
#include "pgs/initial_data.hpp"
#include "pgs/io.hpp"
#include "pgs/physical.hpp"
#include "pgs/selfsimilar.hpp"
#include "pgs/subsolution.hpp"

namespace fs = std::filesystem;
using namespace pgs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNoBlowup = 3;
constexpr int kExitVerification = 4;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  double tolerance_scale = 0.0;  // 0: use the config value
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config_path, "experiment configuration file");
  if (config_required) c->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "override the configured random seed");
  cmd->add_option("--threads", opts.threads, "worker thread budget (compute is deterministic)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance-scale", opts.tolerance_scale,
                  "scale factor applied to verification tolerances");
}

ExperimentConfig load_config(const CommonOptions& opts) {
  ExperimentConfig cfg = parse_config(read_text_file(opts.config_path));
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.tolerance_scale > 0.0) cfg.tolerance_scale = opts.tolerance_scale;
  return cfg;
}

std::vector<double> amplitudes(const ExperimentConfig& cfg) {
  if (static_cast<int>(cfg.amplitude.size()) == cfg.components) return cfg.amplitude;
  return std::vector<double>(static_cast<std::size_t>(cfg.components), cfg.amplitude.front());
}

Field initial_field(const ExperimentConfig& cfg, const Grid& grid, const SystemParams& params) {
  switch (cfg.initial_kind) {
    case InitialKind::constant: return constant_field(grid, amplitudes(cfg));
    case InitialKind::gaussian_bump: return gaussian_bump_field(grid, amplitudes(cfg), cfg.width);
    case InitialKind::zero: return Field(grid, cfg.components);
    case InitialKind::kappa: return kappa_field(grid, params);
    case InitialKind::kappa_perturbed:
      return perturbed_kappa_field(grid, params, cfg.epsilon, cfg.remove_mean);
    case InitialKind::kappa_signflip: return signflip_kappa_field(grid, params);
  }
  throw std::logic_error("unreachable initial kind");
}

void ensure_out_dir(const CommonOptions& opts) { fs::create_directories(opts.out_dir); }

void write_out(const CommonOptions& opts, const std::string& name, const std::string& content) {
  write_text_file((fs::path(opts.out_dir) / name).string(), content);
}

Json witness_json(const Witness& w) {
  return Json::object().set("s", Json::number(w.s)).set("value", Json::number(w.value));
}

Json monitor_json(const MonitorReport& report, double radius, double q) {
  Json flags = Json::object()
                   .set("energy_monotone", Json::boolean(report.energy_monotone))
                   .set("energy_nonnegative", Json::boolean(report.energy_nonnegative))
                   .set("dissipation_bounded", Json::boolean(report.dissipation_bounded))
                   .set("jensen_nonnegative", Json::boolean(report.jensen_nonnegative));
  return Json::object()
      .set("ball_radius", Json::number(radius))
      .set("q", Json::number(q))
      .set("tolerance", Json::number(report.tolerance))
      .set("flags", std::move(flags))
      .set("monotonicity_defect", witness_json(report.monotonicity_defect))
      .set("min_energy", witness_json(report.min_energy))
      .set("initial_energy", Json::number(report.initial_energy))
      .set("cumulative_dissipation", Json::number(report.cumulative_dissipation))
      .set("sup_l2", witness_json(report.sup_l2))
      .set("window_lp1_global", witness_json(report.window_lp1_global))
      .set("sobolev_ratio", witness_json(report.sobolev_ratio))
      .set("max_local_energy", witness_json(report.max_local_energy))
      .set("min_local_energy", witness_json(report.min_local_energy))
      .set("window_ball_mass", witness_json(report.window_ball_mass))
      .set("window_ball_sobolev", witness_json(report.window_ball_sobolev))
      .set("jensen_defect_min", witness_json(report.jensen_defect_min));
}

void require_subcritical(const ExperimentConfig& cfg) {
  const double p = 2.0 * cfg.r + 1.0;
  const auto exponents = sobolev_exponents(cfg.space_dim);
  if (!(p > 1.0) || !(p < exponents.p_S)) {
    throw ConfigError(0, "the rate experiment requires the subcritical hypothesis 1 < p < p_S; "
                         "got p = " + format_double(p) + " with p_S = " +
                         (exponents.p_S.is_infinite() ? std::string("inf")
                                                      : format_double(exponents.p_S.value())) +
                         " for N = " + std::to_string(cfg.space_dim));
  }
}

int cmd_simulate(const CommonOptions& opts) {
  const ExperimentConfig cfg = load_config(opts);
  require_subcritical(cfg);
  const SystemParams params = cfg.system_params();
  const Grid grid(cfg.space_dim, cfg.half_extent, cfg.points_per_axis);
  const Field u0 = initial_field(cfg, grid, params);

  SolveControls controls;
  controls.dt_init = cfg.dt_init;
  controls.sup_threshold = cfg.sup_threshold;
  controls.t_max = cfg.t_max;
  controls.ode_mode = cfg.ode_mode;
  controls.snapshot_stride = cfg.snapshot_stride;

  const BlowupRun run = run_to_blowup(u0, params, controls);
  ensure_out_dir(opts);
  write_out(opts, "trajectory.csv", trajectory_csv(run.trajectory));

  if (cfg.snapshot_stride > 0) {
    fs::create_directories(fs::path(opts.out_dir) / "snapshots");
    std::ostringstream index;
    index << "t,file\n";
    for (std::size_t k = 0; k < run.trajectory.snapshots.size(); ++k) {
      char name[40];
      std::snprintf(name, sizeof(name), "snapshots/snap_%06zu.field", k);
      write_out(opts, name, serialize_field(run.trajectory.snapshots[k].second));
      index << format_double(run.trajectory.snapshots[k].first) << "," << name << "\n";
    }
    write_out(opts, "snapshots.csv", index.str());
  }

  Json rate = Json::object();
  rate.set("seed", Json::integer(static_cast<std::int64_t>(cfg.seed)));
  rate.set("outcome", Json::string(run.outcome == BlowupOutcome::blowup ? "blowup" : "no-blow-up-detected"));
  rate.set("steps", Json::integer(static_cast<std::int64_t>(run.trajectory.points.size()) - 1));
  rate.set("rejected_steps", Json::integer(run.trajectory.rejected_steps));
  if (run.estimate) {
    rate.set("T_est", Json::number(run.estimate->T_est));
    rate.set("fit_window", Json::array()
                               .push(Json::number(run.estimate->window_lo))
                               .push(Json::number(run.estimate->window_hi)));
    rate.set("extrapolation_residual", Json::number(run.estimate->residual));
    try {
      const RateFit fit = fit_rate(run.trajectory, run.estimate->T_est, params);
      rate.set("rate_fit", Json::object()
                               .set("exponent", Json::number(fit.exponent))
                               .set("plateau", Json::number(fit.plateau))
                               .set("window", Json::array()
                                                  .push(Json::number(fit.window_lo))
                                                  .push(Json::number(fit.window_hi)))
                               .set("misfit", Json::number(fit.misfit))
                               .set("expected_exponent", Json::number(params.beta_exp())));
    } catch (const std::invalid_argument& e) {
      rate.set("rate_fit", Json::null());
      rate.set("rate_fit_error", Json::string(e.what()));
    }
  }
  write_out(opts, "rate.json", rate.dump() + "\n");

  if (run.outcome != BlowupOutcome::blowup) {
    std::cout << "no-blow-up-detected (t_max = " << format_double(cfg.t_max) << ")\n";
    return kExitNoBlowup;
  }
  std::cout << "blow-up detected: T_est = " << format_double(run.estimate ? run.estimate->T_est : 0.0)
            << "\n";
  return kExitOk;
}

int cmd_rescaled(const CommonOptions& opts) {
  const ExperimentConfig cfg = load_config(opts);
  const SystemParams params = cfg.system_params();
  const Grid grid(cfg.space_dim, cfg.half_extent, cfg.points_per_axis);
  const Field w0 = initial_field(cfg, grid, params);
  if (cfg.ds > rescaled_stability_ds(grid, params))
    throw ConfigError(0, "solver.ds exceeds the explicit stability bound " +
                             format_double(rescaled_stability_ds(grid, params)) + " for this grid");

  const SelfSimilarFrame start({0.0, 0.0}, 1.0, 0.0, w0);
  const RescaledTrajectory traj = run_rescaled(start, cfg.s_max, cfg.ds, cfg.record_stride, params);

  const CutoffProfile cutoff(cfg.cutoff_radius);
  const auto series = energy_series(traj, params, cutoff, cfg.monitor_radii.front());
  ensure_out_dir(opts);
  write_out(opts, "energy.csv", energy_csv(series));

  FrameMeta meta;
  meta.center = traj.center;
  meta.T = traj.T;
  meta.s = traj.s_at(traj.frames.size() - 1);
  write_out(opts, "frame_final.field", serialize_field(traj.frames.back(), meta));

  // per-frame sup norm series; joins with energy.csv on the s column
  std::ostringstream sup_series;
  sup_series << "s,sup_norm\n";
  for (std::size_t k = 0; k < traj.frames.size(); ++k)
    sup_series << format_double(traj.s_at(k)) << "," << format_double(sup_norm(traj.frames[k])) << "\n";
  write_out(opts, "rescaled.csv", sup_series.str());

  const StructureConstants constants = structure_constants(params);
  Json monitors = Json::array();
  bool all_pass = true;
  for (double radius : cfg.monitor_radii) {
    for (double q : cfg.monitor_q) {
      const auto report = monitor_bounds(traj, radius, q, cutoff, params, constants, cfg.tolerance_scale);
      all_pass = all_pass && report.all_pass();
      monitors.push(monitor_json(report, radius, q));
    }
  }
  Json doc = Json::object();
  doc.set("seed", Json::integer(static_cast<std::int64_t>(cfg.seed)));
  doc.set("initial", Json::string(to_string(cfg.initial_kind)));
  doc.set("s_max", Json::number(cfg.s_max));
  doc.set("c_G", Json::number(constants.c_G));
  doc.set("C_F", Json::number(constants.C_F));
  doc.set("all_pass", Json::boolean(all_pass));
  doc.set("monitors", std::move(monitors));
  write_out(opts, "monitor.json", doc.dump() + "\n");

  std::cout << (all_pass ? "all monitor flags pass\n" : "monitor flag failure\n");
  return all_pass ? kExitOk : kExitVerification;
}

int cmd_verify(const CommonOptions& opts) {
  const ExperimentConfig cfg = load_config(opts);
  const SystemParams params = cfg.system_params();
  bool all_pass = true;
  Json doc = Json::object();
  doc.set("seed", Json::integer(static_cast<std::int64_t>(cfg.seed)));

  // structure conditions on random samples
  const double structure_bar = 1e-12 * cfg.tolerance_scale;
  const auto structure = check_structure(params, cfg.verify_samples, cfg.seed);
  const bool structure_pass = structure.passes(structure_bar);
  all_pass = all_pass && structure_pass;
  doc.set("structure", Json::object()
                           .set("samples", Json::integer(structure.samples))
                           .set("c_G", Json::number(structure.constants.c_G))
                           .set("C_F", Json::number(structure.constants.C_F))
                           .set("max_homogeneity_g", Json::number(structure.max_homogeneity_g))
                           .set("max_homogeneity_f", Json::number(structure.max_homogeneity_f))
                           .set("max_euler", Json::number(structure.max_euler))
                           .set("max_f_bound", Json::number(structure.max_f_bound))
                           .set("max_sandwich_low", Json::number(structure.max_sandwich_low))
                           .set("max_sandwich_high", Json::number(structure.max_sandwich_high))
                           .set("tolerance", Json::number(structure_bar))
                           .set("pass", Json::boolean(structure_pass)));

  const bool kappa_available = params.coupling.equal_row_sums();
  // identity residual convergence on the perturbed benchmark
  if (kappa_available) {
    std::vector<std::array<double, 4>> levels;
    for (int level = 0; level < cfg.verify_levels; ++level) {
      const int n = (cfg.points_per_axis - 1) * (1 << level) + 1;
      const double ds = cfg.ds / (1 << level);
      const Grid grid(cfg.space_dim, cfg.half_extent, n);
      if (ds > rescaled_stability_ds(grid, params))
        throw ConfigError(0, "verify: solver.ds is unstable at refinement level " +
                                 std::to_string(level) + "; lower solver.ds");
      const Field w0 = perturbed_kappa_field(grid, params, cfg.epsilon, false);
      const SelfSimilarFrame start({0.0, 0.0}, 1.0, 0.0, w0);
      const auto traj = run_rescaled(start, cfg.verify_s_interval, ds, 1, params);
      const auto local = check_local_identities(traj, CutoffProfile(cfg.cutoff_radius), params);
      levels.push_back({check_identity_mass(traj, params).max_abs,
                        check_identity_dissipation(traj, params).max_abs, local.mass.max_abs,
                        local.dissipation.max_abs});
    }
    Json conv = Json::object();
    Json level_values = Json::array();
    for (const auto& lv : levels)
      level_values.push(Json::array()
                            .push(Json::number(lv[0]))
                            .push(Json::number(lv[1]))
                            .push(Json::number(lv[2]))
                            .push(Json::number(lv[3])));
    conv.set("residual_levels", std::move(level_values));
    // absolute bar on the finest level: 10 (h^2 + ds^2) x frame scale
    {
      const int finest = cfg.verify_levels - 1;
      const double h_f = cfg.half_extent * 2.0 / ((cfg.points_per_axis - 1) * (1 << finest));
      const double ds_f = cfg.ds / (1 << finest);
      const double scale = 1.0 + kappa_constant(params).front();
      const double bar = 10.0 * (h_f * h_f + ds_f * ds_f) * scale * cfg.tolerance_scale;
      bool abs_pass = true;
      for (int i = 0; i < 4; ++i)
        abs_pass = abs_pass && levels.back()[static_cast<std::size_t>(i)] <= bar;
      conv.set("absolute_bar", Json::number(bar));
      conv.set("absolute_pass", Json::boolean(abs_pass));
      all_pass = all_pass && abs_pass;
    }
    if (cfg.verify_levels >= 2) {
      bool conv_pass = true;
      Json ratios = Json::array();
      for (int i = 0; i < 4; ++i) {
        const double ratio = levels[cfg.verify_levels - 2][static_cast<std::size_t>(i)] /
                             levels[cfg.verify_levels - 1][static_cast<std::size_t>(i)];
        ratios.push(Json::number(ratio));
        conv_pass = conv_pass && ratio >= 3.5;
      }
      conv.set("ratios", std::move(ratios));
      conv.set("required_ratio", Json::number(3.5));
      conv.set("pass", Json::boolean(conv_pass));
      all_pass = all_pass && conv_pass;
    } else {
      conv.set("pass", Json::string("inconclusive: needs verify.levels >= 2"));
    }
    doc.set("identity_convergence", std::move(conv));
  } else {
    doc.set("identity_convergence", Json::string("skipped: coupling rows are not balanced"));
  }

  // subsolution checks on the benchmark family
  if (kappa_available) {
    const Grid grid(cfg.space_dim, cfg.half_extent, cfg.points_per_axis);
    const double h = grid.spacing();
    Json subs = Json::array();
    bool subs_pass = true;
    const auto run_check = [&](const char* name, const Field& w0) {
      const SelfSimilarFrame start({0.0, 0.0}, 1.0, 0.0, w0);
      const auto traj = run_rescaled(start, 8.0 * cfg.ds, cfg.ds, 1, params);
      const double sup_w = sup_norm(aggregate_w(traj.frames.front()).field());
      const double delta = std::max(1e-3 * sup_w, 1e-12);
      const auto report = subsolution_residual(traj, params, delta);
      const double tol = 10.0 * (h * h + cfg.ds * cfg.ds) *
                         std::pow(std::max(1.0, sup_w), params.p()) * cfg.tolerance_scale;
      const bool pointwise_ok = report.mask_empty || report.pointwise_max.value <= tol;
      bool weak_ok = true;
      Json weak = Json::array();
      for (double r : report.weak_residuals) {
        weak.push(Json::number(r));
        weak_ok = weak_ok && r <= tol;
      }
      subs_pass = subs_pass && pointwise_ok && weak_ok;
      subs.push(Json::object()
                    .set("benchmark", Json::string(name))
                    .set("tolerance", Json::number(tol))
                    .set("mask_empty", Json::boolean(report.mask_empty))
                    .set("masked_nodes", Json::integer(report.masked_nodes))
                    .set("pointwise_max", Json::number(report.pointwise_max.value))
                    .set("pointwise_witness", Json::object()
                                                  .set("s", Json::number(report.pointwise_max.s))
                                                  .set("y", Json::array()
                                                               .push(Json::number(report.pointwise_max.point[0]))
                                                               .push(Json::number(report.pointwise_max.point[1]))))
                    .set("pointwise_pass", Json::boolean(pointwise_ok))
                    .set("weak_residuals", std::move(weak))
                    .set("weak_max_bump", Json::integer(report.weak_max_bump))
                    .set("weak_max_s", Json::number(report.weak_max_s))
                    .set("weak_pass", Json::boolean(weak_ok)));
    };
    run_check("signflip", signflip_kappa_field(grid, params));
    run_check("perturbed_kappa", perturbed_kappa_field(grid, params, cfg.epsilon, false));
    run_check("zero", Field(grid, cfg.components));
    all_pass = all_pass && subs_pass;
    doc.set("subsolution", Json::object().set("pass", Json::boolean(subs_pass)).set("benchmarks", std::move(subs)));
  } else {
    doc.set("subsolution", Json::string("skipped: coupling rows are not balanced"));
  }

  doc.set("all_pass", Json::boolean(all_pass));
  ensure_out_dir(opts);
  write_out(opts, "verify.json", doc.dump() + "\n");
  std::cout << (all_pass ? "verification suite passed\n" : "verification suite FAILED\n");
  return all_pass ? kExitOk : kExitVerification;
}

struct ExponentOptions {
  std::string p = "3";
  std::string q = "2";
  std::string qbar;
  std::string lambda;
  std::string q_target;
  double R_target = 1.0;
};

int cmd_exponents(const CommonOptions& opts, const ExponentOptions& eopts) {
  const double p = Rational::parse(eopts.p).to_double();
  const double q = Rational::parse(eopts.q).to_double();
  std::optional<double> qbar, lambda;
  if (!eopts.qbar.empty()) qbar = Rational::parse(eopts.qbar).to_double();
  if (!eopts.lambda.empty()) lambda = Rational::parse(eopts.lambda).to_double();

  const ExponentSchedule schedule = exponent_schedule(p, q, qbar, lambda);
  Json doc = Json::object();
  Json sched = Json::object()
                   .set("p", Json::number(schedule.p))
                   .set("q", Json::number(schedule.q))
                   .set("p1", Json::number(schedule.p1))
                   .set("qbar", Json::number(schedule.qbar))
                   .set("lambda_q", Json::number(schedule.lambda_q))
                   .set("lambda", Json::number(schedule.lambda))
                   .set("theta", Json::number(schedule.theta))
                   .set("alpha", Json::number(schedule.alpha))
                   .set("alpha_conj", Json::number(schedule.alpha_conj))
                   .set("holder_ratio", Json::number(schedule.holder_ratio))
                   .set("feasible", Json::boolean(true));
  // exact values that depend on p and q alone
  {
    const Rational rp = Rational::parse(eopts.p);
    const Rational rq = Rational::parse(eopts.q);
    sched.set("p1_exact", Json::string((Rational(1) + Rational(1) / rp).to_string()));
    sched.set("lambda_q_exact",
              Json::string((rp + Rational(1) - (rp - Rational(1)) / (rq + Rational(1))).to_string()));
  }
  // exact rational mirror when every input is supplied exactly
  if (!eopts.qbar.empty() && !eopts.lambda.empty()) {
    const auto exact = compute_schedule<Rational>(Rational::parse(eopts.p), Rational::parse(eopts.q),
                                                  Rational::parse(eopts.qbar), Rational::parse(eopts.lambda));
    sched.set("exact", Json::object()
                           .set("p1", Json::string(exact.p1.to_string()))
                           .set("qbar", Json::string(exact.qbar.to_string()))
                           .set("lambda_q", Json::string(exact.lambda_q.to_string()))
                           .set("lambda", Json::string(exact.lambda.to_string()))
                           .set("theta", Json::string(exact.theta.to_string()))
                           .set("alpha", Json::string(exact.alpha.to_string()))
                           .set("alpha_conj", Json::string(exact.alpha_conj.to_string()))
                           .set("holder_ratio", Json::string(exact.holder_ratio.to_string())));
  } else {
    sched.set("exact", Json::null());
  }
  doc.set("schedule", std::move(sched));

  if (!eopts.q_target.empty()) {
    const auto chain = bootstrap_chain(Rational::parse(eopts.p), Rational::parse(eopts.q_target),
                                       eopts.R_target);
    Json stages = Json::array();
    for (const auto& stage : chain.stages)
      stages.push(Json::object()
                      .set("q", Json::number(stage.q.to_double()))
                      .set("q_exact", Json::string(stage.q.to_string()))
                      .set("radius", Json::number(stage.radius)));
    doc.set("chain", Json::object()
                         .set("steps", Json::integer(chain.steps))
                         .set("R0", Json::number(chain.stages.front().radius))
                         .set("stages", std::move(stages)));
  } else {
    doc.set("chain", Json::null());
  }

  const std::string text = doc.dump() + "\n";
  ensure_out_dir(opts);
  write_out(opts, "schedule.json", text);
  std::cout << text;
  return kExitOk;
}

int cmd_report(const CommonOptions& opts) {
  Json doc = Json::object();
  const fs::path dir(opts.out_dir);
  const auto attach_csv = [&](const char* name) {
    const fs::path path = dir / name;
    if (!fs::exists(path)) {
      doc.set(name, Json::null());
      return;
    }
    const std::string text = read_text_file(path.string());
    Json entry = Json::object();
    entry.set("bytes", Json::integer(static_cast<std::int64_t>(text.size())));
    const auto lines = static_cast<std::int64_t>(std::count(text.begin(), text.end(), '\n'));
    entry.set("rows", Json::integer(lines > 0 ? lines - 1 : 0));
    doc.set(name, std::move(entry));
  };
  // lift headline values out of the JSON artifacts
  const auto attach_json = [&](const char* name, const std::vector<std::string>& keys) {
    const fs::path path = dir / name;
    if (!fs::exists(path)) {
      doc.set(name, Json::null());
      return;
    }
    Json entry = Json::object();
    try {
      const auto parsed = nlohmann::json::parse(read_text_file(path.string()));
      for (const auto& key : keys) {
        const nlohmann::json* cursor = &parsed;
        std::istringstream split(key);
        std::string part;
        bool found = true;
        while (std::getline(split, part, '.')) {
          if (cursor->contains(part)) {
            cursor = &(*cursor)[part];
          } else {
            found = false;
            break;
          }
        }
        if (!found || cursor->is_null()) continue;
        if (cursor->is_number()) entry.set(key, Json::number(cursor->get<double>()));
        else if (cursor->is_boolean()) entry.set(key, Json::boolean(cursor->get<bool>()));
        else if (cursor->is_string()) entry.set(key, Json::string(cursor->get<std::string>()));
      }
    } catch (const std::exception& e) {
      entry.set("parse_error", Json::string(e.what()));
    }
    doc.set(name, std::move(entry));
  };
  attach_csv("trajectory.csv");
  attach_csv("energy.csv");
  attach_csv("rescaled.csv");
  attach_json("rate.json", {"outcome", "T_est", "rate_fit.exponent", "rate_fit.plateau"});
  attach_json("monitor.json", {"all_pass", "c_G", "C_F"});
  attach_json("verify.json", {"all_pass", "structure.pass"});
  attach_json("schedule.json", {"schedule.lambda", "schedule.alpha", "chain.steps", "chain.R0"});
  const std::string text = doc.dump() + "\n";
  write_text_file((dir / "report.json").string(), text);
  std::cout << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for blow-up in coupled parabolic power systems"};
  app.require_subcommand(1);

  CommonOptions sim_opts, res_opts, ver_opts, exp_opts, rep_opts;
  ExponentOptions eopts;

  auto* simulate = app.add_subcommand("simulate", "integrate the physical problem to blow-up and fit the rate");
  add_common(simulate, sim_opts, true);
  auto* rescaled = app.add_subcommand("rescaled", "integrate the rescaled flow and run the energy monitors");
  add_common(rescaled, res_opts, true);
  auto* verify = app.add_subcommand("verify", "run the structure, identity and subsolution suites");
  add_common(verify, ver_opts, true);
  auto* exponents = app.add_subcommand("exponents", "print the bootstrap exponent schedule");
  add_common(exponents, exp_opts, false);
  exponents->add_option("--p", eopts.p, "nonlinearity exponent p = 2r+1")->required();
  exponents->add_option("--q", eopts.q, "integrability exponent q >= 2")->required();
  exponents->add_option("--qbar", eopts.qbar, "exponent in (q, q + 1/(p+1)); default midpoint");
  exponents->add_option("--lambda", eopts.lambda, "exponent in (2, lambda_q); default by bisection");
  exponents->add_option("--q-target", eopts.q_target, "target exponent for the bootstrap chain");
  exponents->add_option("--R-target", eopts.R_target, "target radius for the bootstrap chain");
  auto* report = app.add_subcommand("report", "aggregate the artifacts found in --out");
  add_common(report, rep_opts, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(sim_opts);
    if (rescaled->parsed()) return cmd_rescaled(res_opts);
    if (verify->parsed()) return cmd_verify(ver_opts);
    if (exponents->parsed()) return cmd_exponents(exp_opts, eopts);
    if (report->parsed()) return cmd_report(rep_opts);
  } catch (const ConfigError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InfeasibleScheduleError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const TruncationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
