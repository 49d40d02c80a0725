#pragma once

// Experiment configuration: a single human-readable key = value file with a
// fixed schema, fully validated before any compute. Parsing keeps line
// numbers so every rejection can point at the offending line. Serialization
// is canonical (fixed key order, 17 significant digits), and
// parse(serialize(parse(text))) == parse(text).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pgs/nonlinearity.hpp"

namespace pgs {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + message
                                    : "config: " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class InitialKind { constant, gaussian_bump, zero, kappa, kappa_perturbed, kappa_signflip };

inline const char* to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::constant: return "constant";
    case InitialKind::gaussian_bump: return "gaussian_bump";
    case InitialKind::zero: return "zero";
    case InitialKind::kappa: return "kappa";
    case InitialKind::kappa_perturbed: return "kappa_perturbed";
    case InitialKind::kappa_signflip: return "kappa_signflip";
  }
  return "?";
}

struct ExperimentConfig {
  // system
  int space_dim = 1;
  int components = 1;
  double r = 1.0;
  std::vector<double> beta_entries;  // components x components, row-major
  // grid
  double half_extent = 12.0;
  int points_per_axis = 241;
  // solver
  double dt_init = 1e-3;
  double sup_threshold = 1e6;
  double t_max = 2.0;
  bool ode_mode = false;
  double ds = 0.004;
  double s_max = 5.0;
  // initial data
  InitialKind initial_kind = InitialKind::gaussian_bump;
  std::vector<double> amplitude{1.0};
  double width = 1.0;
  double epsilon = 0.02;
  bool remove_mean = true;
  // monitors
  std::vector<double> monitor_radii{2.0};
  std::vector<double> monitor_q{2.0};
  double cutoff_radius = 3.0;
  double tolerance_scale = 1.0;
  // verification
  int verify_samples = 1000;
  int verify_levels = 2;
  double verify_s_interval = 0.4;
  // output
  int record_stride = 5;
  int snapshot_stride = 0;
  std::uint64_t seed = 0;

  SystemParams system_params() const {
    return SystemParams(space_dim, components, r, CouplingMatrix(components, beta_entries));
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& text, int line, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(line, key + ": expected a number, got '" + text + "'");
  }
}

inline std::vector<double> parse_number_list(const std::string& text, int line, const std::string& key) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string token;
  while (in >> token) out.push_back(parse_number(token, line, key));
  if (out.empty()) throw ConfigError(line, key + ": expected at least one number");
  return out;
}

inline bool parse_bool(const std::string& text, int line, const std::string& key) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  throw ConfigError(line, key + ": expected true or false, got '" + text + "'");
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, std::pair<std::string, int>> entries;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value', got '" + raw + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (entries.count(key)) throw ConfigError(line_no, "duplicate key '" + key + "'");
    entries[key] = {value, line_no};
  }

  const auto take = [&](const std::string& key) -> std::optional<std::pair<std::string, int>> {
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    auto out = it->second;
    entries.erase(it);
    return out;
  };
  const auto number = [&](const std::string& key, double& slot) {
    if (const auto e = take(key)) slot = detail::parse_number(e->first, e->second, key);
  };
  const auto integer = [&](const std::string& key, int& slot) {
    if (const auto e = take(key)) {
      const double v = detail::parse_number(e->first, e->second, key);
      if (v != std::floor(v)) throw ConfigError(e->second, key + ": expected an integer");
      slot = static_cast<int>(v);
    }
  };
  const auto boolean = [&](const std::string& key, bool& slot) {
    if (const auto e = take(key)) slot = detail::parse_bool(e->first, e->second, key);
  };
  const auto list = [&](const std::string& key, std::vector<double>& slot) {
    if (const auto e = take(key)) slot = detail::parse_number_list(e->first, e->second, key);
  };

  integer("system.space_dim", cfg.space_dim);
  integer("system.components", cfg.components);
  number("system.r", cfg.r);
  int beta_line = 0;
  if (const auto e = take("system.beta")) {
    beta_line = e->second;
    cfg.beta_entries.clear();
    std::istringstream rows(e->first);
    std::string row;
    while (std::getline(rows, row, ';')) {
      const auto vals = detail::parse_number_list(row, e->second, "system.beta");
      cfg.beta_entries.insert(cfg.beta_entries.end(), vals.begin(), vals.end());
    }
  } else {
    cfg.beta_entries.assign(static_cast<std::size_t>(cfg.components) * cfg.components, 0.0);
    for (int i = 0; i < cfg.components; ++i)
      cfg.beta_entries[static_cast<std::size_t>(i) * cfg.components + i] = 1.0;
  }
  number("grid.half_extent", cfg.half_extent);
  integer("grid.points_per_axis", cfg.points_per_axis);
  number("solver.dt_init", cfg.dt_init);
  number("solver.sup_threshold", cfg.sup_threshold);
  number("solver.t_max", cfg.t_max);
  boolean("solver.ode_mode", cfg.ode_mode);
  number("solver.ds", cfg.ds);
  number("solver.s_max", cfg.s_max);
  if (const auto e = take("initial.kind")) {
    const std::string& v = e->first;
    if (v == "constant") cfg.initial_kind = InitialKind::constant;
    else if (v == "gaussian_bump") cfg.initial_kind = InitialKind::gaussian_bump;
    else if (v == "zero") cfg.initial_kind = InitialKind::zero;
    else if (v == "kappa") cfg.initial_kind = InitialKind::kappa;
    else if (v == "kappa_perturbed") cfg.initial_kind = InitialKind::kappa_perturbed;
    else if (v == "kappa_signflip") cfg.initial_kind = InitialKind::kappa_signflip;
    else throw ConfigError(e->second, "initial.kind: unknown kind '" + v + "'");
  }
  list("initial.amplitude", cfg.amplitude);
  number("initial.width", cfg.width);
  number("initial.epsilon", cfg.epsilon);
  boolean("initial.remove_mean", cfg.remove_mean);
  list("monitors.radii", cfg.monitor_radii);
  list("monitors.q", cfg.monitor_q);
  number("monitors.cutoff_radius", cfg.cutoff_radius);
  number("monitors.tolerance_scale", cfg.tolerance_scale);
  integer("verify.samples", cfg.verify_samples);
  integer("verify.levels", cfg.verify_levels);
  number("verify.s_interval", cfg.verify_s_interval);
  integer("output.record_stride", cfg.record_stride);
  integer("output.snapshot_stride", cfg.snapshot_stride);
  if (const auto e = take("seed")) {
    try {
      cfg.seed = std::stoull(e->first);
    } catch (const std::exception&) {
      throw ConfigError(e->second, "seed: expected a nonnegative integer");
    }
  }
  if (!entries.empty()) {
    const auto& bad = *entries.begin();
    throw ConfigError(bad.second.second, "unknown key '" + bad.first + "'");
  }

  // semantic validation (grid support for N is checked by grid construction,
  // after the subcriticality gate of the commands that need it)
  if (cfg.space_dim < 1) throw ConfigError(0, "system.space_dim must be >= 1");
  if (cfg.components < 1) throw ConfigError(0, "system.components must be >= 1");
  if (!(cfg.r > 0.0)) throw ConfigError(0, "system.r must be positive");
  if (cfg.beta_entries.size() != static_cast<std::size_t>(cfg.components) * cfg.components)
    throw ConfigError(beta_line, "system.beta: expected " + std::to_string(cfg.components) + "x" +
                                     std::to_string(cfg.components) + " entries");
  try {
    (void)CouplingMatrix(cfg.components, cfg.beta_entries);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(beta_line, std::string("system.beta: ") + e.what());
  }
  if (!(cfg.half_extent > 0.0)) throw ConfigError(0, "grid.half_extent must be positive");
  if (cfg.points_per_axis < 17 || cfg.points_per_axis % 2 == 0)
    throw ConfigError(0, "grid.points_per_axis must be odd and >= 17");
  if (!(cfg.dt_init > 0.0)) throw ConfigError(0, "solver.dt_init must be positive");
  if (!(cfg.sup_threshold > 0.0)) throw ConfigError(0, "solver.sup_threshold must be positive");
  if (!(cfg.t_max > 0.0)) throw ConfigError(0, "solver.t_max must be positive");
  if (!(cfg.ds > 0.0)) throw ConfigError(0, "solver.ds must be positive");
  if (!(cfg.s_max > 0.0)) throw ConfigError(0, "solver.s_max must be positive");
  if (static_cast<int>(cfg.amplitude.size()) != cfg.components && cfg.amplitude.size() != 1)
    throw ConfigError(0, "initial.amplitude: expected 1 or system.components values");
  if (!(cfg.width > 0.0)) throw ConfigError(0, "initial.width must be positive");
  for (double radius : cfg.monitor_radii)
    if (!(radius > 0.0) || radius > cfg.half_extent)
      throw ConfigError(0, "monitors.radii must be positive and fit inside the grid");
  for (double q : cfg.monitor_q)
    if (!(q >= 2.0)) throw ConfigError(0, "monitors.q entries must be >= 2");
  if (!(cfg.cutoff_radius > 0.0) || 2.0 * cfg.cutoff_radius > cfg.half_extent)
    throw ConfigError(0, "monitors.cutoff_radius: support 2R must fit inside the grid");
  if (!(cfg.tolerance_scale > 0.0)) throw ConfigError(0, "monitors.tolerance_scale must be positive");
  if (cfg.verify_samples < 1) throw ConfigError(0, "verify.samples must be >= 1");
  if (cfg.verify_levels < 1) throw ConfigError(0, "verify.levels must be >= 1");
  if (!(cfg.verify_s_interval > 0.0)) throw ConfigError(0, "verify.s_interval must be positive");
  if (cfg.record_stride < 1) throw ConfigError(0, "output.record_stride must be >= 1");
  if (cfg.snapshot_stride < 0) throw ConfigError(0, "output.snapshot_stride must be >= 0");
  return cfg;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  const auto num = detail::format_number;
  out << "system.space_dim = " << cfg.space_dim << "\n";
  out << "system.components = " << cfg.components << "\n";
  out << "system.r = " << num(cfg.r) << "\n";
  out << "system.beta = ";
  for (int i = 0; i < cfg.components; ++i) {
    if (i) out << " ; ";
    for (int j = 0; j < cfg.components; ++j) {
      if (j) out << " ";
      out << num(cfg.beta_entries[static_cast<std::size_t>(i) * cfg.components + j]);
    }
  }
  out << "\n";
  out << "grid.half_extent = " << num(cfg.half_extent) << "\n";
  out << "grid.points_per_axis = " << cfg.points_per_axis << "\n";
  out << "solver.dt_init = " << num(cfg.dt_init) << "\n";
  out << "solver.sup_threshold = " << num(cfg.sup_threshold) << "\n";
  out << "solver.t_max = " << num(cfg.t_max) << "\n";
  out << "solver.ode_mode = " << (cfg.ode_mode ? "true" : "false") << "\n";
  out << "solver.ds = " << num(cfg.ds) << "\n";
  out << "solver.s_max = " << num(cfg.s_max) << "\n";
  out << "initial.kind = " << to_string(cfg.initial_kind) << "\n";
  out << "initial.amplitude =";
  for (double a : cfg.amplitude) out << " " << num(a);
  out << "\n";
  out << "initial.width = " << num(cfg.width) << "\n";
  out << "initial.epsilon = " << num(cfg.epsilon) << "\n";
  out << "initial.remove_mean = " << (cfg.remove_mean ? "true" : "false") << "\n";
  out << "monitors.radii =";
  for (double radius : cfg.monitor_radii) out << " " << num(radius);
  out << "\n";
  out << "monitors.q =";
  for (double q : cfg.monitor_q) out << " " << num(q);
  out << "\n";
  out << "monitors.cutoff_radius = " << num(cfg.cutoff_radius) << "\n";
  out << "monitors.tolerance_scale = " << num(cfg.tolerance_scale) << "\n";
  out << "verify.samples = " << cfg.verify_samples << "\n";
  out << "verify.levels = " << cfg.verify_levels << "\n";
  out << "verify.s_interval = " << num(cfg.verify_s_interval) << "\n";
  out << "output.record_stride = " << cfg.record_stride << "\n";
  out << "output.snapshot_stride = " << cfg.snapshot_stride << "\n";
  out << "seed = " << cfg.seed << "\n";
  return out.str();
}

}  // namespace pgs
