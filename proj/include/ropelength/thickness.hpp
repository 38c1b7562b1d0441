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
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ropelength/curve.hpp"
#include "ropelength/detail/parallel.hpp"

namespace ropelength {

/// Base point p, unit tangent v and radius r of the swept-ball region
/// O_p(v, r): the union of open r-balls centred at p + r w over unit w normal
/// to v.
struct ObstacleSpec {
  Vector p;
  Vector v;
  double r = 1.0;

  void validate() const {
    if (p.size() != v.size()) throw InvalidInput("obstacle point and tangent differ in dimension");
    if (std::abs(v.norm() - 1.0) > 1e-12) throw InvalidInput("obstacle tangent must be a unit vector");
    if (!(r > 0.0)) throw InvalidInput("obstacle radius must be positive");
  }
};

/// 2 r |d^N| - |d|^2 with d = x - p and d^N its component normal to v.
/// Positive exactly when x lies in the open region O_p(v, r).
///
/// Minimising |x - p - r w|^2 over unit w normal to v gives
/// |d|^2 - 2 r |d^N| + r^2, so membership in some open r-ball reduces to
/// |d|^2 < 2 r |d^N|. Every obstacle query in the library goes through here.
inline double obstacle_penetration(const ObstacleSpec &spec, const Eigen::Ref<const Vector> &x) {
  const Vector d = x - spec.p;
  const Vector dn = d - d.dot(spec.v) * spec.v;
  return 2.0 * spec.r * dn.norm() - d.squaredNorm();
}

inline bool obstacle_contains(const ObstacleSpec &spec, const Eigen::Ref<const Vector> &x) {
  return obstacle_penetration(spec, x) > 0.0;
}

/// Radius of the smallest ball tangent to the curve at (p, t) whose closure
/// reaches x: |d|^2 / (2 |d^N|). Infinite when x lies on the tangent line.
inline double ball_radius_pair(const Eigen::Ref<const Vector> &p, const Eigen::Ref<const Vector> &t,
                               const Eigen::Ref<const Vector> &x) {
  const Vector d = x - p;
  const double along = d.dot(t);
  const double dn2 = std::max(0.0, d.squaredNorm() - along * along);
  const double dn = std::sqrt(dn2);
  if (!(dn > 0.0)) return kInf;
  return d.squaredNorm() / (2.0 * dn);
}

inline double ball_radius_pair(const Curve &curve, std::size_t i, std::size_t j) {
  return ball_radius_pair(curve.point(i), curve.tangent(i), curve.point(j));
}

struct BallRadius {
  double value = kInf;
  /// (i, j): sample i carries the tangent, sample j is the point it touches.
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

/// R_O: minimum over ordered sample pairs (i, j), i != j, of the pairwise ball
/// radius. Pairs closer than exclusion_arc in arclength are skipped; the
/// default 0 keeps every pair. Ties resolve to the smallest (i, j).
inline BallRadius rolling_ball_radius(const Curve &curve, double exclusion_arc = 0.0) {
  if (exclusion_arc < 0) throw InvalidInput("exclusion arc must be non-negative");
  const std::size_t n = curve.size();
  std::vector<BallRadius> partial(detail::chunk_count(n));
  detail::parallel_chunks(n, [&](std::size_t c, std::size_t begin, std::size_t end) {
    BallRadius best;
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        if (exclusion_arc > 0 && curve.arc_distance(i, j) < exclusion_arc) continue;
        const double rho = ball_radius_pair(curve, i, j);
        if (rho < best.value) {
          best.value = rho;
          best.witness = std::pair{i, j};
        }
      }
    }
    partial[c] = best;
  });
  BallRadius out;
  for (const auto &b : partial)
    if (b.value < out.value) out = b;
  return out;
}

struct FocalDistance {
  double value = kInf;
  std::size_t witness = 0;
  /// Pointwise estimate F_g(p_i).
  std::vector<double> per_sample;
  double window = 0.0;
};

inline double default_focal_window(const Curve &curve) { return 10.0 * curve.mean_spacing(); }

/// Geometric focal distance: the pairwise ball radius restricted to partners
/// within arclength `window` of each sample, minimised over samples.
inline FocalDistance geometric_focal_distance(const Curve &curve, double window) {
  FocalDistance out;
  out.window = window;
  const std::size_t n = curve.size();
  out.per_sample.assign(n, kInf);
  detail::parallel_chunks(n, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<std::size_t> win;
    for (std::size_t i = begin; i < end; ++i) {
      detail::window_indices(curve, i, window, win);
      double best = kInf;
      for (std::size_t j : win)
        if (j != i) best = std::min(best, ball_radius_pair(curve, i, j));
      out.per_sample[i] = best;
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (out.per_sample[i] < out.value) {
      out.value = out.per_sample[i];
      out.witness = i;
    }
  }
  return out;
}

inline FocalDistance geometric_focal_distance(const Curve &curve) {
  return geometric_focal_distance(curve, default_focal_window(curve));
}

/// A chord normal to the curve at both ends.
struct CriticalPair {
  double s = 0.0, t = 0.0;       // refined arclength parameters, s <= t
  std::size_t i = 0, j = 0;      // nearest samples
  Vector x_s, x_t;
  double d = 0.0;                // chord length
  double residual_s = 0.0;       // (x_s - x_t) . T(s)
  double residual_t = 0.0;       // (x_s - x_t) . T(t)
};

struct CriticalPairOptions {
  /// Grid step in arclength; <= 0 selects the mean sample spacing.
  double grid_step = 0.0;
  /// Orthogonality residual tolerance relative to the chord length.
  double tol = 1e-8;
  /// Minimum arclength separation; < 0 selects pi * F_k * (1 - 10 / N).
  double exclusion_arc = -1.0;
  /// Merge refined roots closer than two grid steps in both parameters.
  bool dedup = true;
};

namespace detail {

struct PairEval {
  double gs, gt, d;
};

inline PairEval eval_pair(const Curve &c, double s, double t) {
  const Vector ps = c.position_at(s), pt = c.position_at(t);
  const Vector diff = ps - pt;
  return {diff.dot(c.tangent_at(s)), diff.dot(c.tangent_at(t)), diff.norm()};
}

// Damped Newton / Levenberg-Marquardt on (g_s, g_t) over interpolated
// positions and tangents. Returns the refined parameters, or the best iterate
// seen if the iteration does not settle within 50 steps.
inline std::pair<double, double> refine_pair(const Curve &c, double s, double t) {
  const double fd = 1e-6 * c.mean_spacing();
  PairEval cur = eval_pair(c, s, t);
  double cur_norm = std::hypot(cur.gs, cur.gt);
  double best_s = s, best_t = t, best_norm = cur_norm;
  double mu = 0.0;
  for (int it = 0; it < 50; ++it) {
    if (cur_norm <= 1e-15 * std::max(cur.d, c.mean_spacing())) break;
    const PairEval sp = eval_pair(c, s + fd, t), sm = eval_pair(c, s - fd, t);
    const PairEval tp = eval_pair(c, s, t + fd), tm = eval_pair(c, s, t - fd);
    Eigen::Matrix2d jac;
    jac << (sp.gs - sm.gs) / (2 * fd), (tp.gs - tm.gs) / (2 * fd),
        (sp.gt - sm.gt) / (2 * fd), (tp.gt - tm.gt) / (2 * fd);
    const Eigen::Vector2d g(cur.gs, cur.gt);
    const Eigen::Matrix2d jtj = jac.transpose() * jac;
    const double scale = std::max(jtj.trace(), 1e-300);
    bool improved = false;
    for (int damp = 0; damp < 30; ++damp) {
      const Eigen::Matrix2d a = jtj + (mu + 1e-14) * scale * Eigen::Matrix2d::Identity();
      const Eigen::Vector2d step = -a.ldlt().solve(jac.transpose() * g);
      // Keep each step within a couple of samples so the linearization holds.
      const double cap = 4.0 * c.mean_spacing();
      const double len = step.norm();
      const Eigen::Vector2d clipped = len > cap ? Eigen::Vector2d(step * (cap / len)) : step;
      const double ns = c.wrap_param(s + clipped(0)), nt = c.wrap_param(t + clipped(1));
      const PairEval trial = eval_pair(c, ns, nt);
      const double trial_norm = std::hypot(trial.gs, trial.gt);
      if (trial_norm < cur_norm) {
        s = ns;
        t = nt;
        cur = trial;
        cur_norm = trial_norm;
        mu *= 0.3;
        improved = true;
        break;
      }
      mu = mu == 0.0 ? 1e-6 : mu * 10.0;
    }
    if (cur_norm < best_norm) {
      best_norm = cur_norm;
      best_s = s;
      best_t = t;
    }
    if (!improved) break;
  }
  return {best_s, best_t};
}

}  // namespace detail

/// Exclusion arc used by the double-critical scan: pi * F_k, relaxed by the
/// 10/N discretization tolerance so that exactly antipodal circle points stay
/// admissible.
inline double default_exclusion_arc(const Curve &curve, double f_k) {
  if (!std::isfinite(f_k)) return 0.0;
  const double n = static_cast<double>(curve.size());
  return kPi * f_k * std::max(0.0, 1.0 - 10.0 / n);
}

/// Scans the (s, t) torus for double critical pairs, refines every candidate
/// cell, and returns the pairs with both residuals below tol * d.
inline std::vector<CriticalPair> double_critical_pairs(const Curve &curve,
                                                       CriticalPairOptions opts = {}) {
  if (!curve.closed()) throw InvalidInput("double critical pairs require a closed curve");
  const std::size_t n = curve.size();
  const double spacing = curve.mean_spacing();
  const double grid_step = opts.grid_step > 0 ? opts.grid_step : spacing;
  if (grid_step < 0.999 * spacing)
    throw InvalidInput("grid step must be at least the mean sample spacing");
  const double exclusion = opts.exclusion_arc >= 0
                               ? opts.exclusion_arc
                               : default_exclusion_arc(curve, curvature_profile(curve).f_k);
  const std::size_t stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(grid_step / spacing)));
  std::vector<std::size_t> grid;
  for (std::size_t a = 0; a < n; a += stride) grid.push_back(a);
  const std::size_t g = grid.size();
  const double cell_span = stride * curve.max_spacing();
  const double zero_slack = 1e-12 * curve.length();

  auto gs = [&](std::size_t x, std::size_t y) {
    return (curve.point(x) - curve.point(y)).dot(curve.tangent(x));
  };
  auto gt = [&](std::size_t x, std::size_t y) {
    return (curve.point(x) - curve.point(y)).dot(curve.tangent(y));
  };
  auto spans_zero = [&](double a, double b, double c, double d) {
    const double lo = std::min({a, b, c, d}), hi = std::max({a, b, c, d});
    return lo <= zero_slack && hi >= -zero_slack;
  };

  std::vector<std::vector<CriticalPair>> partial(detail::chunk_count(g));
  detail::parallel_chunks(g, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    auto &out = partial[chunk];
    for (std::size_t ga = begin; ga < end; ++ga) {
      const std::size_t a0 = grid[ga], a1 = grid[(ga + 1) % g];
      for (std::size_t gb = ga + 1; gb < g; ++gb) {
        const std::size_t b0 = grid[gb], b1 = grid[(gb + 1) % g];
        const double sep = std::min({curve.arc_distance(a0, b0), curve.arc_distance(a0, b1),
                                     curve.arc_distance(a1, b0), curve.arc_distance(a1, b1)});
        if (sep + 2.0 * cell_span < exclusion) continue;
        if (!spans_zero(gs(a0, b0), gs(a1, b0), gs(a0, b1), gs(a1, b1))) continue;
        if (!spans_zero(gt(a0, b0), gt(a1, b0), gt(a0, b1), gt(a1, b1))) continue;

        const double s0 = curve.arclength(a0) + 0.5 * stride * spacing;
        const double t0 = curve.arclength(b0) + 0.5 * stride * spacing;
        auto [s, t] = detail::refine_pair(curve, curve.wrap_param(s0), curve.wrap_param(t0));
        const detail::PairEval ev = detail::eval_pair(curve, s, t);
        if (!(ev.d > 0.0)) continue;
        if (std::abs(ev.gs) > opts.tol * ev.d || std::abs(ev.gt) > opts.tol * ev.d) continue;
        if (curve.arc_distance_param(s, t) < exclusion) continue;
        if (s > t) std::swap(s, t);
        CriticalPair cp;
        cp.s = s;
        cp.t = t;
        cp.i = curve.nearest_sample(s);
        cp.j = curve.nearest_sample(t);
        cp.x_s = curve.position_at(s);
        cp.x_t = curve.position_at(t);
        cp.d = (cp.x_s - cp.x_t).norm();
        const Vector diff = cp.x_s - cp.x_t;
        cp.residual_s = diff.dot(curve.tangent_at(s));
        cp.residual_t = diff.dot(curve.tangent_at(t));
        out.push_back(std::move(cp));
      }
    }
  });

  std::vector<CriticalPair> all;
  for (auto &p : partial)
    for (auto &cp : p) all.push_back(std::move(cp));
  if (!opts.dedup) return all;

  const double merge = 2.0 * stride * curve.max_spacing();
  std::vector<CriticalPair> kept;
  for (auto &cp : all) {
    bool dup = false;
    for (const auto &k : kept) {
      // Unordered comparison: a root near the seam may come back with s and t swapped.
      const bool same = curve.arc_distance_param(cp.s, k.s) <= merge && curve.arc_distance_param(cp.t, k.t) <= merge;
      const bool swapped =
          curve.arc_distance_param(cp.s, k.t) <= merge && curve.arc_distance_param(cp.t, k.s) <= merge;
      if (same || swapped) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(std::move(cp));
  }
  return kept;
}

struct MdcResult {
  double value = kInf;
  std::optional<CriticalPair> witness;
  std::size_t pair_count = 0;
};

/// Minimal double critical distance: shortest chord among the double critical
/// pairs, infinite when there are none.
inline MdcResult mdc(const Curve &curve, CriticalPairOptions opts = {}) {
  MdcResult out;
  auto pairs = double_critical_pairs(curve, opts);
  out.pair_count = pairs.size();
  for (auto &p : pairs) {
    if (p.d < out.value) {
      out.value = p.d;
      out.witness = p;
    }
  }
  return out;
}

struct ThicknessReport {
  double length = 0.0;
  double f_k = kInf;
  double f_g = kInf;
  double mdc = kInf;
  double r_o = kInf;
  /// min(f_k, mdc / 2)
  double thickness = kInf;
  /// length / r_o
  double ropelength = kInf;
  /// |r_o - thickness|
  double agreement_gap = 0.0;
  /// |f_k - f_g|
  double lemma2_gap = 0.0;
  /// Adaptive agreement tolerance 10 / N, relative.
  double tol = 0.0;
  bool low_resolution = false;
  bool formula_consistent = true;  // r_o <= f_g + tol and r_o <= mdc/2 + tol
  bool ropelength_sane = true;     // ropelength >= 2 pi - tol

  std::size_t kappa_witness = 0;
  std::size_t f_g_witness = 0;
  std::optional<std::pair<std::size_t, std::size_t>> r_o_witness;
  std::optional<CriticalPair> mdc_witness;
  std::size_t critical_pair_count = 0;

  CurvatureProfile curvature;
  FocalDistance focal;
};

namespace detail {
inline double abs_gap(double a, double b) {
  if (std::isinf(a) && std::isinf(b)) return 0.0;
  return std::abs(a - b);
}
}  // namespace detail

/// Assembles every thickness invariant of a closed curve.
inline ThicknessReport thickness_report(const Curve &curve, CriticalPairOptions opts = {}) {
  if (!curve.closed()) throw InvalidInput("thickness report requires a closed curve");
  ThicknessReport rep;
  rep.length = curve.length();
  rep.low_resolution = curve.low_resolution();
  rep.tol = 10.0 / static_cast<double>(curve.size());

  rep.curvature = curvature_profile(curve);
  rep.f_k = rep.curvature.f_k;
  rep.kappa_witness = rep.curvature.argmax;

  rep.focal = geometric_focal_distance(curve);
  rep.f_g = rep.focal.value;
  rep.f_g_witness = rep.focal.witness;

  if (opts.exclusion_arc < 0) opts.exclusion_arc = default_exclusion_arc(curve, rep.f_k);
  const MdcResult m = mdc(curve, opts);
  rep.mdc = m.value;
  rep.mdc_witness = m.witness;
  rep.critical_pair_count = m.pair_count;

  const BallRadius ball = rolling_ball_radius(curve);
  rep.r_o = ball.value;
  rep.r_o_witness = ball.witness;

  rep.thickness = std::min(rep.f_k, 0.5 * rep.mdc);
  rep.ropelength = rep.length / rep.r_o;
  rep.agreement_gap = detail::abs_gap(rep.r_o, rep.thickness);
  rep.lemma2_gap = detail::abs_gap(rep.f_k, rep.f_g);

  const double abs_tol = std::isfinite(rep.r_o) ? rep.tol * rep.r_o : 0.0;
  rep.formula_consistent = rep.r_o <= rep.f_g + abs_tol && rep.r_o <= 0.5 * rep.mdc + abs_tol;
  rep.ropelength_sane = rep.ropelength >= 2.0 * kPi * (1.0 - rep.tol);
  return rep;
}

/// Upper semicontinuity of R_O and lower semicontinuity of MDC measured along
/// a sequence whose last element is the limit curve.
struct SemicontinuityReport {
  std::vector<double> r_o;   // one per approximant, limit excluded
  std::vector<double> mdc;
  double r_o_limit = kInf;
  double mdc_limit = kInf;
  /// tail_sup_r_o[k] = max_{j >= k} r_o[j]; tail_inf_mdc[k] = min_{j >= k} mdc[j].
  std::vector<double> tail_sup_r_o;
  std::vector<double> tail_inf_mdc;
  std::size_t tail_start = 0;
  double tol = 0.0;
  bool r_o_upper_ok = false;  // tail_sup_r_o[tail_start] <= r_o_limit + tol
  bool mdc_lower_ok = false;  // tail_inf_mdc[tail_start] >= mdc_limit - tol
  bool passed() const { return r_o_upper_ok && mdc_lower_ok; }
};

/// `tail_start` indexes the approximants (the limit is excluded); by default
/// the tail is the last approximant alone.
inline SemicontinuityReport semicontinuity_probe(const std::vector<Curve> &curves, double tol,
                                                 std::optional<std::size_t> tail_start = {}) {
  if (curves.size() < 2) throw InvalidInput("semicontinuity probe needs at least two curves");
  SemicontinuityReport rep;
  rep.tol = tol;
  const std::size_t m = curves.size() - 1;
  for (std::size_t k = 0; k < m; ++k) {
    rep.r_o.push_back(rolling_ball_radius(curves[k]).value);
    rep.mdc.push_back(mdc(curves[k]).value);
  }
  rep.r_o_limit = rolling_ball_radius(curves.back()).value;
  rep.mdc_limit = mdc(curves.back()).value;
  rep.tail_sup_r_o.assign(m, -kInf);
  rep.tail_inf_mdc.assign(m, kInf);
  for (std::size_t k = m; k-- > 0;) {
    rep.tail_sup_r_o[k] = std::max(rep.r_o[k], k + 1 < m ? rep.tail_sup_r_o[k + 1] : -kInf);
    rep.tail_inf_mdc[k] = std::min(rep.mdc[k], k + 1 < m ? rep.tail_inf_mdc[k + 1] : kInf);
  }
  rep.tail_start = tail_start.value_or(m - 1);
  if (rep.tail_start >= m) throw InvalidInput("tail start beyond the last approximant");
  rep.r_o_upper_ok = rep.tail_sup_r_o[rep.tail_start] <= rep.r_o_limit + tol;
  rep.mdc_lower_ok = rep.tail_inf_mdc[rep.tail_start] >= rep.mdc_limit - tol;
  return rep;
}

}  // namespace ropelength
