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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ropelength/curve.hpp"
#include "ropelength/structure.hpp"
#include "ropelength/thickness.hpp"

namespace ropelength {

// ---------------------------------------------------------------------------
// Point classes.

enum class CurvatureClass { zero, maximal, between };

inline const char *to_string(CurvatureClass c) {
  switch (c) {
    case CurvatureClass::zero: return "Iz";
    case CurvatureClass::maximal: return "Imx";
    case CurvatureClass::between: return "Ib";
  }
  return "?";
}

/// Every sample carries exactly one curvature class; membership in Ic is
/// stored separately because it does not exclude the others.
struct PointClasses {
  std::vector<CurvatureClass> kappa_class;
  std::vector<bool> critical;
  /// Partner sample of the shortest critical chord through each Ic sample.
  std::vector<std::optional<std::size_t>> partner;
  double tol = 0.0;
  double r_o = kInf;
  double mdc = kInf;

  std::size_t count(CurvatureClass c) const {
    return static_cast<std::size_t>(std::count(kappa_class.begin(), kappa_class.end(), c));
  }
  std::size_t critical_count() const {
    return static_cast<std::size_t>(std::count(critical.begin(), critical.end(), true));
  }
};

inline double default_structure_tol(const Curve &curve) { return 10.0 / static_cast<double>(curve.size()); }

/// Iz: kappa <= tol / r_o. Imx: |kappa - 1 / r_o| <= tol / r_o. Ib otherwise.
/// Ic: endpoints of critical chords no longer than (1 + tol) mdc.
inline PointClasses classify_points(const Curve &curve, const ThicknessReport &report, double tol) {
  if (!curve.closed()) throw InvalidInput("point classification requires a closed curve");
  const std::size_t n = curve.size();
  PointClasses pc;
  pc.tol = tol;
  pc.r_o = report.r_o;
  pc.mdc = report.mdc;
  pc.kappa_class.assign(n, CurvatureClass::between);
  pc.critical.assign(n, false);
  pc.partner.assign(n, std::nullopt);
  const double k_max = std::isfinite(report.r_o) ? 1.0 / report.r_o : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = report.curvature.kappa[i];
    if (k <= tol * k_max)
      pc.kappa_class[i] = CurvatureClass::zero;
    else if (std::abs(k - k_max) <= tol * k_max)
      pc.kappa_class[i] = CurvatureClass::maximal;
  }
  if (std::isfinite(report.mdc)) {
    CriticalPairOptions opts;
    opts.dedup = false;
    opts.exclusion_arc = default_exclusion_arc(curve, report.f_k);
    std::vector<double> best(n, kInf);
    for (const auto &cp : double_critical_pairs(curve, opts)) {
      if (cp.d > (1.0 + tol) * report.mdc) continue;
      for (auto [a, b] : {std::pair{cp.i, cp.j}, std::pair{cp.j, cp.i}}) {
        pc.critical[a] = true;
        if (cp.d < best[a]) {
          best[a] = cp.d;
          pc.partner[a] = b;
        }
      }
    }
  }
  return pc;
}

// ---------------------------------------------------------------------------
// Decomposition into segments and arcs.

enum class RunKind { segment, arc, other };

inline const char *to_string(RunKind k) {
  switch (k) {
    case RunKind::segment: return "segment";
    case RunKind::arc: return "arc";
    case RunKind::other: return "other";
  }
  return "?";
}

struct CircleFit {
  Vector center;
  Eigen::MatrixXd plane;  // n x 2 orthonormal basis
  double radius = kInf;
  /// Largest distance of a fitted point from the plane.
  double planarity = 0.0;
  /// Largest | |x - c| - radius | over fitted points.
  double radial_deviation = 0.0;
};

/// Best-fit plane by principal components, algebraic circle fit in that plane,
/// then Gauss-Newton on the geometric distances.
inline CircleFit fit_circle(const Eigen::MatrixXd &pts) {
  if (pts.cols() < 3) throw InvalidInput("circle fit needs at least three points");
  const Eigen::Index m = pts.cols();
  const Vector mean = pts.rowwise().mean();
  const Eigen::MatrixXd centered = pts.colwise() - mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  CircleFit fit;
  fit.plane = svd.matrixU().leftCols(2);
  const Eigen::MatrixXd xy = fit.plane.transpose() * centered;  // 2 x m
  for (Eigen::Index k = 0; k < m; ++k)
    fit.planarity = std::max(fit.planarity, (centered.col(k) - fit.plane * xy.col(k)).norm());

  Eigen::MatrixXd a(m, 3);
  Vector rhs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    a(k, 0) = xy(0, k);
    a(k, 1) = xy(1, k);
    a(k, 2) = 1.0;
    rhs(k) = xy.col(k).squaredNorm();
  }
  const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(rhs);
  Eigen::Vector2d c(0.5 * sol(0), 0.5 * sol(1));
  double r = std::sqrt(std::max(0.0, sol(2) + c.squaredNorm()));
  for (int it = 0; it < 20; ++it) {
    Eigen::MatrixXd jac(m, 3);
    Vector res(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const Eigen::Vector2d d = xy.col(k) - c;
      const double dist = std::max(d.norm(), 1e-300);
      res(k) = dist - r;
      jac(k, 0) = -d.x() / dist;
      jac(k, 1) = -d.y() / dist;
      jac(k, 2) = -1.0;
    }
    const Eigen::Vector3d step = jac.colPivHouseholderQr().solve(-res);
    c += step.head<2>();
    r += step(2);
    if (step.norm() < 1e-14 * std::max(1.0, r)) break;
  }
  fit.radius = std::abs(r);
  fit.center = mean + fit.plane * c;
  for (Eigen::Index k = 0; k < m; ++k)
    fit.radial_deviation = std::max(fit.radial_deviation, std::abs((xy.col(k) - c).norm() - fit.radius));
  return fit;
}

struct StructureRun {
  Run run;
  RunKind kind = RunKind::other;
  double length = 0.0;
  /// Chord deviation / length (segments).
  double straightness = 0.0;
  std::optional<CircleFit> circle;
  /// Total tangent turning (arcs).
  double turning = 0.0;
  /// turning * fitted radius (arcs).
  double arc_length = 0.0;
  /// Segment runs: chord test passed. Arc runs: radius within tol of F_k and
  /// planarity below tol * F_k.
  bool valid = true;
  bool meets_critical = false;
  bool starts_at_critical = false;
  bool ends_at_critical = false;
};

struct StructureReport {
  std::vector<StructureRun> runs;
  PointClasses classes;
  double tol = 0.0;
  double f_k = kInf;
  double r_o = kInf;
  double mdc = kInf;
  /// |r_o - mdc / 2|
  double thickness_gap = kInf;
  /// Samples trimmed from each end of a run before fitting.
  std::size_t trim = 0;

  std::size_t count(RunKind k) const {
    return static_cast<std::size_t>(
        std::count_if(runs.begin(), runs.end(), [k](const StructureRun &r) { return r.kind == k; }));
  }
};

namespace detail {

inline RunKind run_kind(CurvatureClass c) {
  switch (c) {
    case CurvatureClass::zero: return RunKind::segment;
    case CurvatureClass::maximal: return RunKind::arc;
    default: return RunKind::other;
  }
}

// Ic membership near a run end, within `slack` samples.
inline bool critical_near(const Curve &c, const PointClasses &pc, std::size_t idx, std::size_t slack) {
  for (std::ptrdiff_t o = -static_cast<std::ptrdiff_t>(slack); o <= static_cast<std::ptrdiff_t>(slack); ++o)
    if (pc.critical[c.wrap(static_cast<std::ptrdiff_t>(idx) + o)]) return true;
  return false;
}

}  // namespace detail

inline StructureReport decompose_structure(const Curve &curve, const ThicknessReport &report, double tol) {
  StructureReport rep;
  rep.classes = classify_points(curve, report, tol);
  rep.tol = tol;
  rep.f_k = report.f_k;
  rep.r_o = report.r_o;
  rep.mdc = report.mdc;
  rep.thickness_gap = detail::abs_gap(report.r_o, 0.5 * report.mdc);
  // The curvature window blurs run boundaries by its half-width.
  rep.trim = static_cast<std::size_t>(std::ceil(report.curvature.window / curve.mean_spacing()));

  std::vector<int> labels(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) labels[i] = static_cast<int>(rep.classes.kappa_class[i]);
  // Ib runs narrower than the curvature window are transition blur between a
  // segment and an arc; each sample joins the nearer curvature class.
  const double k_max = std::isfinite(report.r_o) ? 1.0 / report.r_o : 0.0;
  for (const Run &run : detail::label_runs(curve, labels)) {
    if (run.label != static_cast<int>(CurvatureClass::between) || run.count > rep.trim) continue;
    if (run.count == curve.size()) continue;
    for (std::size_t k = 0; k < run.count; ++k) {
      const std::size_t i = run.index(curve, k);
      const double kap = report.curvature.kappa[i];
      labels[i] = static_cast<int>(kap < 0.5 * k_max ? CurvatureClass::zero : CurvatureClass::maximal);
    }
  }
  for (const Run &run : detail::label_runs(curve, labels)) {
    StructureRun sr;
    sr.run = run;
    sr.kind = detail::run_kind(static_cast<CurvatureClass>(run.label));
    sr.length = detail::run_length(curve, run);
    for (std::size_t k = 0; k < run.count; ++k)
      if (rep.classes.critical[run.index(curve, k)]) sr.meets_critical = true;
    sr.starts_at_critical = detail::critical_near(curve, rep.classes, run.start, rep.trim);
    sr.ends_at_critical = detail::critical_near(curve, rep.classes, run.last(curve), rep.trim);
    const bool whole = run.count == curve.size();
    if (sr.kind == RunKind::segment) {
      sr.straightness = sr.length > 0 && !whole ? detail::run_chord_deviation(curve, run) / sr.length : 0.0;
      sr.valid = !whole && sr.straightness < tol;
    } else if (sr.kind == RunKind::arc) {
      sr.turning = detail::run_turning(curve, run);
      if (whole) sr.turning += unit_angle(curve.tangent(curve.size() - 1), curve.tangent(0));
      // Fit on the core of the run, away from the blurred ends.
      std::size_t lo = 0, hi = run.count;
      if (!whole && run.count > 3 * rep.trim + 3) {
        lo = rep.trim;
        hi = run.count - rep.trim;
      }
      if (hi - lo >= 3) {
        Eigen::MatrixXd pts(curve.dim(), static_cast<Eigen::Index>(hi - lo));
        for (std::size_t k = lo; k < hi; ++k) pts.col(static_cast<Eigen::Index>(k - lo)) = curve.point(run.index(curve, k));
        sr.circle = fit_circle(pts);
        sr.arc_length = sr.turning * sr.circle->radius;
        const double f_k = report.f_k;
        sr.valid = std::abs(sr.circle->radius - f_k) <= tol * f_k && sr.circle->planarity < tol * f_k;
      } else {
        sr.valid = false;
      }
    } else {
      sr.valid = false;
    }
    rep.runs.push_back(std::move(sr));
  }
  return rep;
}

inline StructureReport decompose_structure(const Curve &curve, double tol) {
  return decompose_structure(curve, thickness_report(curve), tol);
}

/// Replaces segment runs by their chord line and arc cores by the fitted
/// circle; other samples are kept. Used to check that the decomposition is a
/// fixed point.
inline Curve reconstruct(const Curve &curve, const StructureReport &rep) {
  Points pts = curve.points();
  Points tan = curve.tangents();
  for (const auto &sr : rep.runs) {
    const Run &run = sr.run;
    if (sr.kind == RunKind::segment && sr.valid) {
      const Vector a = curve.point(run.start), b = curve.point(run.last(curve));
      const Vector dir = (b - a).normalized();
      for (std::size_t k = 0; k < run.count; ++k) {
        const auto i = static_cast<Eigen::Index>(run.index(curve, k));
        pts.col(i) = a + (pts.col(i) - a).dot(dir) * dir;
        tan.col(i) = dir;
      }
    } else if (sr.kind == RunKind::arc && sr.circle) {
      const CircleFit &c = *sr.circle;
      std::size_t lo = 0, hi = run.count;
      if (run.count != curve.size() && run.count > 3 * rep.trim + 3) {
        lo = rep.trim;
        hi = run.count - rep.trim;
      }
      for (std::size_t k = lo; k < hi; ++k) {
        const auto i = static_cast<Eigen::Index>(run.index(curve, k));
        const Eigen::Vector2d xy = c.plane.transpose() * (pts.col(i) - c.center);
        const Eigen::Vector2d u = xy.normalized();
        pts.col(i) = c.center + c.plane * (c.radius * u);
        Vector t = c.plane * Eigen::Vector2d(-u.y(), u.x());
        if (t.dot(tan.col(i)) < 0) t = -t;
        tan.col(i) = t;
      }
    }
  }
  return build_curve(std::move(pts), curve.closed(), std::move(tan));
}

// ---------------------------------------------------------------------------
// Necessary conditions for relative extremality.

struct Theorem2Clause {
  std::size_t segment_run = 0;
  std::string description;
  bool passed = true;
};

struct Theorem2Verdict {
  /// Some sample has kappa < sup kappa (1 - tol).
  bool hypothesis = false;
  double thickness_gap = 0.0;  // |r_o - mdc/2| / r_o
  bool thickness_ok = true;
  std::vector<Theorem2Clause> clauses;
  bool passed = true;
  std::string summary;
};

/// If the curvature is not constant, requires r_o = mdc / 2 and that each
/// segment run away from Ic is flanked by arcs of radius F_k spanning at least
/// pi F_k or ending at Ic. Classification uses `class_tol`; the verdict
/// comparisons use `tol`, so the verdict is monotone in tol.
inline Theorem2Verdict check_theorem2(const Curve &curve, const ThicknessReport &report, double tol,
                                      std::optional<double> class_tol = {}) {
  Theorem2Verdict v;
  const auto &kappa = report.curvature.kappa;
  const double sup = report.curvature.sup_kappa;
  v.hypothesis = std::any_of(kappa.begin(), kappa.end(), [&](double k) { return k < sup * (1.0 - tol); });
  v.thickness_gap = detail::abs_gap(report.r_o, 0.5 * report.mdc) / report.r_o;
  if (!v.hypothesis) {
    v.summary = "vacuous: curvature is constant";
    return v;
  }
  v.thickness_ok = v.thickness_gap <= tol;
  const StructureReport st = decompose_structure(curve, report, class_tol.value_or(default_structure_tol(curve)));
  const std::size_t nr = st.runs.size();
  for (std::size_t r = 0; r < nr; ++r) {
    const StructureRun &seg = st.runs[r];
    if (seg.kind != RunKind::segment || seg.meets_critical) continue;
    for (int side : {-1, 1}) {
      Theorem2Clause c;
      c.segment_run = r;
      const StructureRun &arc = st.runs[side < 0 ? (r + nr - 1) % nr : (r + 1) % nr];
      // The far end of the flanking arc from the segment.
      const bool far_critical = side < 0 ? arc.starts_at_critical : arc.ends_at_critical;
      if (arc.kind != RunKind::arc || !arc.circle) {
        c.passed = false;
        c.description = "segment not flanked by a maximal-curvature arc";
      } else {
        const double radius_gap = std::abs(arc.circle->radius - report.f_k) / report.f_k;
        const bool long_enough = arc.arc_length >= kPi * report.f_k * (1.0 - tol);
        c.passed = radius_gap <= tol && (long_enough || far_critical);
        c.description = "flanking arc radius gap " + std::to_string(radius_gap) + ", length " +
                         std::to_string(arc.arc_length) + (far_critical ? ", ends at Ic" : "");
      }
      v.clauses.push_back(std::move(c));
    }
  }
  v.passed = v.thickness_ok &&
             std::all_of(v.clauses.begin(), v.clauses.end(), [](const Theorem2Clause &c) { return c.passed; });
  v.summary = v.passed ? "necessary conditions hold" : "necessary conditions violated";
  return v;
}

inline Theorem2Verdict check_theorem2(const Curve &curve, double tol) {
  return check_theorem2(curve, thickness_report(curve), tol);
}

struct Theorem3Verdict {
  /// mdc / 2 > r_o (1 + tol)
  bool triggered = false;
  /// max_i |kappa_i - 1 / r_o| * r_o
  double max_deviation = 0.0;
  bool passed = true;
  std::string summary;
};

/// Contrapositive test: a curve whose thickness is not set by a critical
/// chord must have constant curvature 1 / r_o.
inline Theorem3Verdict check_theorem3(const ThicknessReport &report, double tol) {
  Theorem3Verdict v;
  const double k_max = 1.0 / report.r_o;
  for (double k : report.curvature.kappa) v.max_deviation = std::max(v.max_deviation, std::abs(k - k_max) * report.r_o);
  v.triggered = 0.5 * report.mdc > report.r_o * (1.0 + tol);
  if (!v.triggered) {
    v.summary = "hypothesis not triggered";
    return v;
  }
  v.passed = v.max_deviation <= tol;
  v.summary = v.passed ? "constant curvature as required" : "not relatively extremal: curvature is not constant";
  return v;
}

inline Theorem3Verdict check_theorem3(const Curve &curve, double tol) {
  return check_theorem3(thickness_report(curve), tol);
}

}  // namespace ropelength
