// Copyright 2026 The ropelength Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ropelength/clc.hpp"
#include "ropelength/curve.hpp"
#include "ropelength/extremal.hpp"
#include "ropelength/fixtures.hpp"
#include "ropelength/oracle.hpp"
#include "ropelength/relax.hpp"
#include "ropelength/structure.hpp"
#include "ropelength/thickness.hpp"

namespace ropelength::io {

using json = nlohmann::ordered_json;

inline constexpr const char *kToolVersion = "0.1.0";

/// Malformed input document; the message names the line or field.
class ParseError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// ---------------------------------------------------------------------------
// Numbers. JSON has no infinity, so non-finite values travel as strings.

inline json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline double to_number(const json &j, const std::string &field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto &s = j.get_ref<const std::string &>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ParseError("field '" + field + "': expected a number");
}

inline json vector_json(const Eigen::Ref<const Vector> &v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

inline Vector to_vector(const json &j, const std::string &field, std::optional<int> dim = {}) {
  if (!j.is_array()) throw ParseError("field '" + field + "': expected an array of numbers");
  if (dim && static_cast<int>(j.size()) != *dim)
    throw ParseError("field '" + field + "': expected " + std::to_string(*dim) + " components, got " +
                     std::to_string(j.size()));
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = to_number(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

// ---------------------------------------------------------------------------
// Curve documents.

struct CurveDocument {
  int dim = 2;
  bool closed = true;
  Points points;
  std::optional<Points> tangents;
  /// Free-form metadata (name, generator parameters), preserved on round trip.
  json metadata = json::object();

  Curve to_curve() const { return build_curve(points, closed, tangents); }

  static CurveDocument from_curve(const Curve &c, json metadata = json::object(), bool with_tangents = true) {
    CurveDocument d;
    d.dim = c.dim();
    d.closed = c.closed();
    d.points = c.points();
    if (with_tangents) d.tangents = c.tangents();
    d.metadata = std::move(metadata);
    return d;
  }
};

inline json points_json(const Points &p) {
  json rows = json::array();
  for (Eigen::Index k = 0; k < p.cols(); ++k) rows.push_back(vector_json(p.col(k)));
  return rows;
}

inline json to_json(const CurveDocument &d) {
  json j;
  j["dim"] = d.dim;
  j["closed"] = d.closed;
  j["points"] = points_json(d.points);
  if (d.tangents) j["tangents"] = points_json(*d.tangents);
  if (!d.metadata.empty()) j["metadata"] = d.metadata;
  return j;
}

inline Points points_from_json(const json &rows, int dim, const std::string &field) {
  if (!rows.is_array()) throw ParseError("field '" + field + "': expected an array of points");
  Points p(dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k)
    p.col(static_cast<Eigen::Index>(k)) = to_vector(rows[k], field + "[" + std::to_string(k) + "]", dim);
  return p;
}

inline CurveDocument curve_document_from_json(const json &j) {
  if (!j.is_object()) throw ParseError("curve document must be an object");
  for (const char *key : {"dim", "closed", "points"})
    if (!j.contains(key)) throw ParseError(std::string("field '") + key + "': missing");
  CurveDocument d;
  if (!j["dim"].is_number_integer()) throw ParseError("field 'dim': expected an integer");
  d.dim = j["dim"].get<int>();
  if (d.dim < 2) throw ParseError("field 'dim': must be at least 2");
  if (!j["closed"].is_boolean()) throw ParseError("field 'closed': expected true or false");
  d.closed = j["closed"].get<bool>();
  d.points = points_from_json(j["points"], d.dim, "points");
  if (j.contains("tangents")) {
    d.tangents = points_from_json(j["tangents"], d.dim, "tangents");
    if (d.tangents->cols() != d.points.cols())
      throw ParseError("field 'tangents': expected one tangent per point");
  }
  if (j.contains("metadata")) d.metadata = j["metadata"];
  return d;
}

inline json parse_json(const std::string &text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    // Locate the failing line from the byte offset.
    const std::size_t upto = std::min(e.byte, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto > 0 ? upto - 1 : 0), '\n'));
    throw ParseError("line " + std::to_string(line) + ": malformed document (" + e.what() + ")");
  }
}

/// Comma- or whitespace-separated rows, one point per row. A non-numeric
/// first row is taken as a header.
inline CurveDocument curve_document_from_csv(const std::string &text, bool closed) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (char &ch : line)
      if (ch == ',' || ch == ';' || ch == '\t' || ch == '\r') ch = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    bool numeric = true;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) numeric = false;
      } catch (const std::exception &) {
        numeric = false;
      }
    }
    if (row.empty() && numeric) continue;  // blank line
    if (!numeric) {
      if (rows.empty() && lineno == 1) continue;
      throw ParseError("line " + std::to_string(lineno) + ": expected numbers");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) +
                       " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("line 1: no points");
  CurveDocument d;
  d.dim = static_cast<int>(rows.front().size());
  if (d.dim < 2) throw ParseError("line 1: points need at least two coordinates");
  d.closed = closed;
  d.points.resize(d.dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (int i = 0; i < d.dim; ++i) d.points(i, static_cast<Eigen::Index>(k)) = rows[k][static_cast<std::size_t>(i)];
  return d;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool looks_like_json(const std::string &text) {
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    return ch == '{';
  }
  return false;
}

/// Reads a JSON curve document, or CSV when the content is not an object.
/// `closed` applies to CSV input only.
inline CurveDocument read_curve_document(const std::string &path, bool closed = true) {
  const std::string text = read_file(path);
  if (looks_like_json(text)) return curve_document_from_json(parse_json(text));
  return curve_document_from_csv(text, closed);
}

inline std::string dump(const json &j) { return j.dump(2) + "\n"; }

inline std::string write_curve_document(const CurveDocument &d) { return dump(to_json(d)); }

inline void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << text;
}

// ---------------------------------------------------------------------------
// Boundary data.

inline BoundaryData boundary_from_json(const json &j) {
  if (!j.is_object()) throw ParseError("boundary document must be an object");
  for (const char *key : {"p", "q", "v", "w", "lambda"})
    if (!j.contains(key)) throw ParseError(std::string("field '") + key + "': missing");
  BoundaryData b;
  b.p = to_vector(j["p"], "p");
  const int n = static_cast<int>(b.p.size());
  b.q = to_vector(j["q"], "q", n);
  b.v = to_vector(j["v"], "v", n);
  b.w = to_vector(j["w"], "w", n);
  b.lambda = to_number(j["lambda"], "lambda");
  return b;
}

inline json to_json(const BoundaryData &b) {
  json j;
  j["p"] = vector_json(b.p);
  j["q"] = vector_json(b.q);
  j["v"] = vector_json(b.v);
  j["w"] = vector_json(b.w);
  j["lambda"] = number(b.lambda);
  return j;
}

// ---------------------------------------------------------------------------
// Fixtures.

struct FixtureParams {
  std::map<std::string, double> scalars;
  std::map<std::string, Vector> vectors;
};

inline const std::vector<std::string> &fixture_kinds() {
  static const std::vector<std::string> kinds = {"circle",       "ellipse", "stadium",
                                                 "rounded_square", "clc",   "example1_offset_circle",
                                                 "torus_knot_sample", "bumped_circle"};
  return kinds;
}

/// Analytic sampling of a named fixture; unknown parameters are rejected.
inline CurveDocument generate_fixture(const std::string &kind, const FixtureParams &params) {
  std::map<std::string, double> used;
  std::vector<std::string> allowed;
  auto get = [&](const std::string &key, double fallback) {
    allowed.push_back(key);
    const auto it = params.scalars.find(key);
    const double v = it == params.scalars.end() ? fallback : it->second;
    used[key] = v;
    return v;
  };
  auto count = [&](double fallback) {
    const double v = get("n", fallback);
    if (!(v >= 2) || v != std::floor(v)) throw InvalidInput("parameter 'n' must be an integer >= 2");
    return static_cast<std::size_t>(v);
  };

  Curve c = [&]() -> Curve {
    if (kind == "circle") {
      const double r = get("r", 1.0);
      const std::size_t n = count(1024);
      return fixtures::circle(r, n, get("cx", 0.0), get("cy", 0.0));
    }
    if (kind == "ellipse") {
      const double a = get("a", 2.0), b = get("b", 1.0);
      return fixtures::ellipse(a, b, count(2048));
    }
    if (kind == "stadium") {
      const double r = get("r", 1.0), len = get("length", 4.0);
      return fixtures::stadium(r, len, count(2048));
    }
    if (kind == "rounded_square") {
      const double r = get("r", 1.0), side = get("side", 4.0);
      return fixtures::rounded_square(r, side, count(2048));
    }
    if (kind == "example1_offset_circle") {
      const double eps = get("eps", 0.05);
      return fixtures::example1_offset_circle(eps, count(4096));
    }
    if (kind == "torus_knot_sample") {
      const double p = get("p", 2), q = get("q", 3), big = get("R", 2.0), small = get("r", 1.0);
      if (p != std::floor(p) || q != std::floor(q)) throw InvalidInput("torus knot p and q must be integers");
      return fixtures::torus_knot(static_cast<int>(p), static_cast<int>(q), big, small, count(1024));
    }
    if (kind == "bumped_circle") {
      const double amp = get("amplitude", 0.03), width = get("width", 0.8);
      return fixtures::bumped_circle(amp, width, count(256));
    }
    if (kind == "clc") {
      for (const char *key : {"p", "q", "v", "w"})
        if (!params.vectors.count(key)) throw InvalidInput(std::string("clc fixture needs vector parameter '") + key + "'");
      const BoundaryData b{params.vectors.at("p"), params.vectors.at("q"), params.vectors.at("v"),
                           params.vectors.at("w"), get("lambda", 1.0)};
      const auto cands = csc_candidates(b);
      if (cands.empty()) throw InvalidInput("no CLC path meets the boundary data");
      return fixtures::clc(cands.front(), count(512));
    }
    throw InvalidInput("unknown fixture kind '" + kind + "'");
  }();

  for (const auto &[key, value] : params.scalars) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw InvalidInput("unknown parameter '" + key + "' for fixture '" + kind + "'");
  }
  if (kind != "clc" && !params.vectors.empty())
    throw InvalidInput("fixture '" + kind + "' takes no vector parameters");

  json meta;
  meta["name"] = kind;
  json gen = json::object();
  for (const auto &[key, value] : used) gen[key] = number(value);
  for (const auto &[key, value] : params.vectors) gen[key] = vector_json(value);
  meta["generator"] = gen;
  return CurveDocument::from_curve(c, meta);
}

// ---------------------------------------------------------------------------
// Reports.

struct Report {
  std::string command;
  std::uint64_t seed = 0;
  json inputs = json::object();
  json results = json::object();
  json witnesses = json::object();
  json tolerances = json::object();

  json to_json() const {
    json j;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["inputs"] = inputs;
    j["seed"] = seed;
    j["results"] = results;
    j["witnesses"] = witnesses;
    j["tolerances"] = tolerances;
    return j;
  }
  std::string str() const { return dump(to_json()); }
};

inline json to_json(const CriticalPair &cp) {
  json j;
  j["s"] = number(cp.s);
  j["t"] = number(cp.t);
  j["i"] = cp.i;
  j["j"] = cp.j;
  j["x_s"] = vector_json(cp.x_s);
  j["x_t"] = vector_json(cp.x_t);
  j["d"] = number(cp.d);
  j["residual_s"] = number(cp.residual_s);
  j["residual_t"] = number(cp.residual_t);
  return j;
}

inline void fill(Report &r, const ThicknessReport &t) {
  r.results["length"] = number(t.length);
  r.results["f_k"] = number(t.f_k);
  r.results["f_g"] = number(t.f_g);
  r.results["mdc"] = number(t.mdc);
  r.results["r_o"] = number(t.r_o);
  r.results["thickness"] = number(t.thickness);
  r.results["ropelength"] = number(t.ropelength);
  r.results["agreement_gap"] = number(t.agreement_gap);
  r.results["lemma2_gap"] = number(t.lemma2_gap);
  r.results["critical_pair_count"] = t.critical_pair_count;
  r.results["formula_consistent"] = t.formula_consistent;
  r.results["ropelength_sane"] = t.ropelength_sane;
  r.results["low_resolution"] = t.low_resolution;
  r.witnesses["sup_kappa_sample"] = t.kappa_witness;
  r.witnesses["f_g_sample"] = t.f_g_witness;
  r.witnesses["r_o_pair"] = t.r_o_witness ? json::array({t.r_o_witness->first, t.r_o_witness->second}) : json();
  r.witnesses["mdc_pair"] = t.mdc_witness ? to_json(*t.mdc_witness) : json();
  r.tolerances["agreement"] = number(t.tol);
  r.tolerances["curvature_window"] = number(t.curvature.window);
  r.tolerances["focal_window"] = number(t.focal.window);
}

inline json to_json(const CircularArc &a) {
  json j;
  j["start"] = vector_json(a.start);
  j["tangent"] = vector_json(a.tangent);
  j["normal"] = vector_json(a.normal);
  j["center"] = vector_json(a.center());
  j["angle"] = number(a.angle);
  j["radius"] = number(a.radius);
  j["length"] = number(a.length());
  return j;
}

inline json to_json(const ClcPath &p) {
  json j;
  j["word"] = p.word;
  j["length"] = number(p.length());
  j["first_arc"] = to_json(p.first);
  j["segment"] = {{"start", vector_json(p.segment_start)},
                  {"end", vector_json(p.segment_end())},
                  {"direction", vector_json(p.segment_direction)},
                  {"length", number(p.segment_length)}};
  j["second_arc"] = to_json(p.second);
  j["joint_residual"] = number(p.joint_residual());
  return j;
}

inline json to_json(const OracleResult &o) {
  json j;
  j["length"] = number(o.length);
  j["segments"] = o.polyline.size() - 1;
  j["turning_budget"] = number(o.turning_budget);
  j["min_saturation"] = number(o.min_saturation);
  j["saturated_fraction"] = number(o.saturated_fraction);
  j["constraint_violation"] = number(o.constraint_violation);
  j["restart"] = o.restart;
  j["feasible_restarts"] = o.feasible_restarts;
  return j;
}

inline json to_json(const StructureReport &s, const Curve &c) {
  json runs = json::array();
  for (const auto &r : s.runs) {
    json j;
    j["kind"] = to_string(r.kind);
    j["start"] = r.run.start;
    j["last"] = r.run.last(c);
    j["count"] = r.run.count;
    j["length"] = number(r.length);
    j["valid"] = r.valid;
    j["meets_ic"] = r.meets_critical;
    if (r.kind == RunKind::segment) j["straightness"] = number(r.straightness);
    if (r.circle) {
      j["radius"] = number(r.circle->radius);
      j["center"] = vector_json(r.circle->center);
      j["planarity"] = number(r.circle->planarity);
      j["radial_deviation"] = number(r.circle->radial_deviation);
      j["arc_length"] = number(r.arc_length);
    }
    runs.push_back(std::move(j));
  }
  return runs;
}

// ---------------------------------------------------------------------------
// CSV exports.

/// index, arclength, kappa, local focal distance.
inline std::string profile_csv(const Curve &c, const ThicknessReport &t) {
  std::ostringstream out;
  out.precision(17);
  out << "index,s,kappa,f_g\n";
  for (std::size_t i = 0; i < c.size(); ++i)
    out << i << ',' << c.arclength(i) << ',' << t.curvature.kappa[i] << ',' << t.focal.per_sample[i] << '\n';
  return out.str();
}

inline std::string trace_csv(const RelaxResult &r) {
  std::ostringstream out;
  out.precision(17);
  out << "step,length,r_o,ropelength\n";
  for (const auto &s : r.trace) out << s.step << ',' << s.length << ',' << s.r_o << ',' << s.ropelength << '\n';
  return out.str();
}

}  // namespace ropelength::io
