#pragma once

// Output formats: CSV time series, an ordered JSON writer with 17 significant
// digit floats (byte-identical reruns), and the grid-field file layout
// "pgs-field 1" / header (N, M, n, L[, frame meta]) / values one per line,
// component-major with nodes in x-fastest order.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pgs/grid.hpp"
#include "pgs/physical.hpp"
#include "pgs/selfsimilar.hpp"

namespace pgs {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string json_number_token(double v) {
  if (!std::isfinite(v)) return "null";  // JSON has no infinities
  return format_double(v);
}

// Insertion-ordered JSON tree; just enough for the report files.
class Json {
 public:
  static Json number(double v) { return Json(Kind::number, json_number_token(v)); }
  static Json integer(std::int64_t v) { return Json(Kind::number, std::to_string(v)); }
  static Json boolean(bool v) { return Json(Kind::boolean, v ? "true" : "false"); }
  static Json string(std::string v) { return Json(Kind::string, std::move(v)); }
  static Json null() { return Json(Kind::null, "null"); }
  static Json object() { return Json(Kind::object, ""); }
  static Json array() { return Json(Kind::array, ""); }

  Json& set(const std::string& key, Json value) {
    members_.emplace_back(key, std::move(value));
    return *this;
  }
  Json& push(Json value) {
    items_.push_back(std::move(value));
    return *this;
  }

  std::string dump(int indent = 0) const {
    std::ostringstream out;
    write(out, indent);
    return out.str();
  }

 private:
  enum class Kind { number, boolean, string, null, object, array };
  Json(Kind kind, std::string scalar) : kind_(kind), scalar_(std::move(scalar)) {}

  static void escape(std::ostream& out, const std::string& s) {
    out << '"';
    for (char c : s) {
      switch (c) {
        case '"': out << "\\\""; break;
        case '\\': out << "\\\\"; break;
        case '\n': out << "\\n"; break;
        case '\t': out << "\\t"; break;
        default: out << c;
      }
    }
    out << '"';
  }

  void write(std::ostream& out, int level) const {
    const std::string pad(static_cast<std::size_t>(level) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(level + 1) * 2, ' ');
    switch (kind_) {
      case Kind::number:
      case Kind::boolean:
      case Kind::null:
        out << scalar_;
        break;
      case Kind::string:
        escape(out, scalar_);
        break;
      case Kind::object: {
        if (members_.empty()) {
          out << "{}";
          break;
        }
        out << "{\n";
        for (std::size_t i = 0; i < members_.size(); ++i) {
          out << pad_in;
          escape(out, members_[i].first);
          out << ": ";
          members_[i].second.write(out, level + 1);
          out << (i + 1 < members_.size() ? ",\n" : "\n");
        }
        out << pad << "}";
        break;
      }
      case Kind::array: {
        if (items_.empty()) {
          out << "[]";
          break;
        }
        out << "[\n";
        for (std::size_t i = 0; i < items_.size(); ++i) {
          out << pad_in;
          items_[i].write(out, level + 1);
          out << (i + 1 < items_.size() ? ",\n" : "\n");
        }
        out << pad << "]";
        break;
      }
    }
  }

  Kind kind_;
  std::string scalar_;
  std::vector<std::pair<std::string, Json>> members_;
  std::vector<Json> items_;
};

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct FrameMeta {
  std::array<double, 2> center{0.0, 0.0};
  double T = 1.0;
  double s = 0.0;
};

inline std::string serialize_field(const Field& f, const std::optional<FrameMeta>& meta = std::nullopt) {
  std::ostringstream out;
  const Grid& g = f.grid();
  out << "pgs-field 1\n";
  out << g.space_dim() << " " << f.components() << " " << g.axis_points() << " "
      << format_double(g.half_extent()) << "\n";
  if (meta) {
    out << "frame " << format_double(meta->center[0]);
    if (g.space_dim() == 2) out << " " << format_double(meta->center[1]);
    out << " " << format_double(meta->T) << " " << format_double(meta->s) << "\n";
  }
  for (int c = 0; c < f.components(); ++c)
    for (std::int64_t node = 0; node < f.nodes(); ++node) out << format_double(f.at(c, node)) << "\n";
  return out.str();
}

inline std::pair<Field, std::optional<FrameMeta>> deserialize_field(const std::string& text) {
  std::istringstream in(text);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "pgs-field" || version != 1)
    throw std::runtime_error("field file: bad header");
  int dim = 0, components = 0, n = 0;
  double half_extent = 0.0;
  if (!(in >> dim >> components >> n >> half_extent))
    throw std::runtime_error("field file: bad geometry line");
  const Grid grid(dim, half_extent, n);
  std::optional<FrameMeta> meta;
  std::string token;
  if (!(in >> token)) throw std::runtime_error("field file: truncated");
  if (token == "frame") {
    FrameMeta m;
    if (!(in >> m.center[0])) throw std::runtime_error("field file: bad frame meta");
    if (dim == 2 && !(in >> m.center[1])) throw std::runtime_error("field file: bad frame meta");
    if (!(in >> m.T >> m.s)) throw std::runtime_error("field file: bad frame meta");
    meta = m;
    if (!(in >> token)) throw std::runtime_error("field file: truncated");
  }
  Field f(grid, components);
  std::int64_t total = grid.total_nodes() * components;
  std::int64_t count = 0;
  double value = std::stod(token);
  f.raw()[0] = value;
  ++count;
  while (count < total && (in >> value)) {
    f.raw()[static_cast<std::size_t>(count)] = value;
    ++count;
  }
  if (count != total) throw std::runtime_error("field file: value count mismatch");
  return {std::move(f), meta};
}

inline std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "t,sup_norm,dt\n";
  for (const auto& pt : traj.points)
    out << format_double(pt.t) << "," << format_double(pt.sup_norm) << "," << format_double(pt.dt) << "\n";
  return out.str();
}

template <class SampleRange>
std::string energy_csv(const SampleRange& samples) {
  std::ostringstream out;
  out << "s,E,E_loc,l2rho,w12rho,lp1rho_ball,dissipation\n";
  for (const auto& row : samples) {
    out << format_double(row.s) << "," << format_double(row.E) << "," << format_double(row.E_loc) << ","
        << format_double(row.l2rho) << "," << format_double(row.w12rho) << ","
        << format_double(row.lp1rho_ball) << "," << format_double(row.dissipation) << "\n";
  }
  return out.str();
}

}  // namespace pgs
