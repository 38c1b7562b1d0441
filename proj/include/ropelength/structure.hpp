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

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ropelength/clc.hpp"
#include "ropelength/curve.hpp"
#include "ropelength/oracle.hpp"
#include "ropelength/thickness.hpp"

namespace ropelength {

/// Maximal block of consecutive samples sharing a label. Indices wrap on
/// closed curves.
struct Run {
  std::size_t start = 0;
  std::size_t count = 0;
  int label = 0;

  std::size_t index(const Curve &c, std::size_t k) const {
    return c.wrap(static_cast<std::ptrdiff_t>(start + k));
  }
  std::size_t last(const Curve &c) const { return index(c, count - 1); }
};

namespace detail {

// A closed curve whose labels never change yields one run starting at 0.
inline std::vector<Run> label_runs(const Curve &c, const std::vector<int> &labels) {
  const std::size_t n = labels.size();
  std::vector<Run> runs;
  if (n == 0) return runs;
  std::size_t origin = 0;
  if (c.closed()) {
    while (origin < n && labels[origin] == labels[(origin + n - 1) % n]) ++origin;
    if (origin == n) return {Run{0, n, labels[0]}};
  }
  Run cur{origin, 1, labels[origin]};
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t i = (origin + k) % n;
    if (labels[i] == cur.label) {
      ++cur.count;
    } else {
      runs.push_back(cur);
      cur = Run{i, 1, labels[i]};
    }
  }
  runs.push_back(cur);
  return runs;
}

inline double run_length(const Curve &c, const Run &r) {
  double len = 0.0;
  for (std::size_t k = 0; k + 1 < r.count; ++k) len += c.segment_length(r.index(c, k));
  return len;
}

// Sum of angles between consecutive sample tangents inside the run.
inline double run_turning(const Curve &c, const Run &r) {
  double turn = 0.0;
  for (std::size_t k = 0; k + 1 < r.count; ++k)
    turn += unit_angle(c.tangent(r.index(c, k)), c.tangent(r.index(c, k + 1)));
  return turn;
}

// Largest distance of run points from the chord through its end points.
inline double run_chord_deviation(const Curve &c, const Run &r) {
  const Vector a = c.point(r.start), b = c.point(r.last(c));
  Vector dir = b - a;
  const double len = dir.norm();
  double worst = 0.0;
  for (std::size_t k = 0; k < r.count; ++k) {
    const Vector d = c.point(r.index(c, k)) - a;
    const double dev = len > 0 ? (d - d.dot(dir / len) * (dir / len)).norm() : d.norm();
    worst = std::max(worst, dev);
  }
  return worst;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Structure of a purported shortest curve.

struct Theorem1Run {
  Run run;
  bool maximal = false;  // kappa within tol of Lambda
  double length = 0.0;
  /// Chord deviation / length, sub-maximal runs only.
  double straightness = 0.0;
  /// Arc length recovered as total turning / Lambda, maximal runs only.
  double arc_length = 0.0;
  bool touches_endpoint = false;
  bool adjacent_to_straight = false;
  bool passed = true;
  std::string reason;
};

struct Theorem1Verdict {
  double lambda = 0.0;
  double tol = 0.0;
  std::vector<Theorem1Run> runs;
  std::size_t failures = 0;
  bool passed() const { return failures == 0; }
};

/// Splits the curve into sub-maximal runs (kappa < Lambda (1 - tol)) and
/// maximal runs, then checks that sub-maximal interior runs are straight and
/// that interior maximal runs next to a straight run span at least pi / Lambda
/// (relative tolerance tol) unless they contain an end point.
inline Theorem1Verdict verify_theorem1_structure(const Curve &curve, double lambda, double tol) {
  if (!(lambda > 0.0)) throw InvalidInput("curvature bound must be positive");
  Theorem1Verdict out;
  out.lambda = lambda;
  out.tol = tol;
  const CurvatureProfile prof = curvature_profile(curve);
  std::vector<int> labels(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i)
    labels[i] = prof.kappa[i] >= lambda * (1.0 - tol) ? 1 : 0;
  const auto runs = detail::label_runs(curve, labels);
  const std::size_t last_sample = curve.size() - 1;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    Theorem1Run tr;
    tr.run = runs[r];
    tr.maximal = runs[r].label == 1;
    tr.length = detail::run_length(curve, runs[r]);
    tr.touches_endpoint = !curve.closed() && (runs[r].start == 0 || runs[r].last(curve) == last_sample);
    const bool has_prev = curve.closed() ? runs.size() > 1 : r > 0;
    const bool has_next = curve.closed() ? runs.size() > 1 : r + 1 < runs.size();
    // Labels alternate, so any neighbour of a maximal run is sub-maximal.
    tr.adjacent_to_straight = tr.maximal && (has_prev || has_next);
    if (!tr.maximal) {
      tr.straightness = tr.length > 0 ? detail::run_chord_deviation(curve, runs[r]) / tr.length : 0.0;
      if (tr.straightness >= tol) {
        tr.passed = false;
        tr.reason = "sub-maximal run is not straight";
      }
    } else {
      tr.arc_length = detail::run_turning(curve, runs[r]) / lambda;
      if (tr.adjacent_to_straight && !tr.touches_endpoint && tr.arc_length < kPi / lambda * (1.0 - tol)) {
        tr.passed = false;
        tr.reason = "interior arc shorter than pi / Lambda";
      }
    }
    if (!tr.passed) ++out.failures;
    out.runs.push_back(std::move(tr));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Containment in the complement of the osculating obstacle.

struct ContainmentReport {
  double lambda = 0.0;
  double margin = 0.0;
  std::size_t pairs_checked = 0;
  /// Pairs (a, s) with gamma(s) inside O_{gamma(a)}(gamma'(a), 1/Lambda).
  std::vector<std::pair<std::size_t, std::size_t>> violations;
  double worst_penetration = -kInf;
  /// Pairs on the obstacle boundary within the margin.
  std::size_t contacts = 0;
  /// Samples a whose every checked partner is a boundary contact.
  std::vector<std::size_t> full_contact_samples;
  bool passed() const { return violations.empty(); }
};

/// For all sample pairs within arclength pi / Lambda, measures whether gamma(s)
/// stays outside the obstacle of radius 1 / Lambda at gamma(a). Penetrations
/// are normalized by 1 / Lambda^2. Requires sup kappa <= Lambda (1 + kappa_tol).
inline ContainmentReport verify_prop2_containment(const Curve &curve, double lambda, double margin = 1e-6,
                                                  double kappa_tol = 1e-2) {
  if (!(lambda > 0.0)) throw InvalidInput("curvature bound must be positive");
  const CurvatureProfile prof = curvature_profile(curve);
  if (prof.sup_kappa > lambda * (1.0 + kappa_tol))
    throw InvalidInput("curve curvature exceeds the stated bound");
  ContainmentReport rep;
  rep.lambda = lambda;
  rep.margin = margin;
  const double radius = 1.0 / lambda, reach = kPi / lambda, scale = lambda * lambda;
  const std::size_t n = curve.size();
  for (std::size_t a = 0; a < n; ++a) {
    const ObstacleSpec spec{Vector(curve.point(a)), Vector(curve.tangent(a)), radius};
    std::size_t checked = 0, touching = 0;
    for (std::size_t s = 0; s < n; ++s) {
      if (s == a || curve.arc_distance(a, s) > reach) continue;
      ++checked;
      const double pen = obstacle_penetration(spec, curve.point(s)) * scale;
      rep.worst_penetration = std::max(rep.worst_penetration, pen);
      if (pen > margin)
        rep.violations.emplace_back(a, s);
      else if (pen > -margin)
        ++touching;
    }
    rep.pairs_checked += checked;
    rep.contacts += touching;
    if (checked > 0 && touching == checked) rep.full_contact_samples.push_back(a);
  }
  return rep;
}

/// Length of an arc whose end points lie on the sphere of radius 1 / Lambda
/// about a centre and which leaves the closed ball in between.
struct ExcursionProbe {
  double length = 0.0;
  double max_radius = 0.0;
  double endpoint_radius_error = 0.0;
  bool endpoints_on_sphere = false;
  bool exits_ball = false;
  double sup_kappa = 0.0;
  /// length > pi / Lambda - tol whenever the hypotheses hold.
  bool passed = false;
};

inline ExcursionProbe excursion_probe(const Curve &curve, const Vector &center, double lambda, double tol = 1e-6) {
  if (curve.closed()) throw InvalidInput("excursion probe needs an open arc");
  if (center.size() != curve.dim()) throw InvalidInput("centre dimension does not match the curve");
  ExcursionProbe p;
  const double radius = 1.0 / lambda;
  p.length = curve.length();
  for (std::size_t i = 0; i < curve.size(); ++i)
    p.max_radius = std::max(p.max_radius, (curve.point(i) - center).norm());
  p.endpoint_radius_error = std::max(std::abs((curve.point(0) - center).norm() - radius),
                                     std::abs((curve.point(curve.size() - 1) - center).norm() - radius));
  p.endpoints_on_sphere = p.endpoint_radius_error <= tol * radius;
  p.exits_ball = p.max_radius > radius * (1.0 + tol);
  p.sup_kappa = curvature_profile(curve).sup_kappa;
  p.passed = !(p.endpoints_on_sphere && p.exits_ball) || p.length > kPi * radius - tol;
  return p;
}

// ---------------------------------------------------------------------------
// Planner front end.

enum class PlanRegime { clc, constant_curvature, oracle_only };

inline const char *to_string(PlanRegime r) {
  switch (r) {
    case PlanRegime::clc: return "clc";
    case PlanRegime::constant_curvature: return "constant_curvature";
    case PlanRegime::oracle_only: return "oracle_only";
  }
  return "unknown";
}

struct PlanOptions {
  CscOptions csc;
  OracleOptions oracle;
  bool run_oracle = true;
  /// Oracle lengths shorter than the best candidate by more than this
  /// fraction flag the constant-curvature regime.
  double agreement = 0.01;
};

struct PlanResult {
  PlanRegime regime = PlanRegime::clc;
  std::vector<ClcPath> candidates;
  std::optional<OracleResult> oracle;
  /// q lies in the obstacle at p and p in the obstacle at q.
  bool infeasible_for_clc_check = false;
  double best_length() const { return candidates.empty() ? kInf : candidates.front().length(); }
};

inline PlanResult plan_shortest_path(const BoundaryData &b, const PlanOptions &opts = {}) {
  b.validate();
  PlanResult res;
  const double radius = 1.0 / b.lambda;
  res.infeasible_for_clc_check =
      obstacle_contains(ObstacleSpec{b.p, b.v, radius}, b.q) && obstacle_contains(ObstacleSpec{b.q, b.w, radius}, b.p);
  if (res.infeasible_for_clc_check) {
    res.regime = PlanRegime::oracle_only;
    res.oracle = discrete_shortest_oracle(b, opts.oracle);
    return res;
  }
  res.candidates = csc_candidates(b, opts.csc);
  if (opts.run_oracle) res.oracle = discrete_shortest_oracle(b, opts.oracle);
  if (res.candidates.empty())
    res.regime = PlanRegime::constant_curvature;
  else if (res.oracle && res.oracle->length < res.best_length() * (1.0 - opts.agreement))
    res.regime = PlanRegime::constant_curvature;
  return res;
}

}  // namespace ropelength
