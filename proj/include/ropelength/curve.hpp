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
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ropelength/detail/parallel.hpp"

namespace ropelength {

using Vector = Eigen::VectorXd;
/// Column-major sample matrix: one column per sample, one row per coordinate.
using Points = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = std::numbers::pi;

/// Thrown for inputs that violate a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Angle between two unit vectors, computed as 2 asin(|u - v| / 2) so that it
/// stays accurate near 0 and near pi.
inline double unit_angle(const Eigen::Ref<const Vector> &u,
                         const Eigen::Ref<const Vector> &v) {
  const double half_chord = 0.5 * (u - v).norm();
  return 2.0 * std::asin(std::min(1.0, half_chord));
}

/// A sampled curve in R^n, open or closed, with unit tangents and cumulative
/// chord length. Instances are immutable once built; use build_curve().
class Curve {
 public:
  Curve() = default;

  int dim() const { return static_cast<int>(points_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  bool closed() const { return closed_; }

  const Points &points() const { return points_; }
  const Points &tangents() const { return tangents_; }
  auto point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }
  auto tangent(std::size_t i) const { return tangents_.col(static_cast<Eigen::Index>(i)); }

  /// Cumulative chord length at sample i (s_0 = 0).
  double arclength(std::size_t i) const { return cum_[i]; }
  const std::vector<double> &cum_arclength() const { return cum_; }

  /// Total length; for closed curves this includes the closing chord.
  double length() const { return length_; }

  /// Number of chords: N - 1 for open curves, N for closed ones.
  std::size_t segment_count() const { return closed_ ? size() : size() - 1; }
  double segment_length(std::size_t i) const {
    const std::size_t j = closed_ ? (i + 1) % size() : i + 1;
    return (point(j) - point(i)).norm();
  }
  double mean_spacing() const { return length_ / static_cast<double>(segment_count()); }
  double max_spacing() const { return max_spacing_; }

  /// Closed curves with fewer than 8 samples are accepted but flagged.
  bool low_resolution() const { return closed_ && size() < 8; }

  std::size_t wrap(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(size());
    return static_cast<std::size_t>(((i % n) + n) % n);
  }

  /// Arclength between two samples: along the curve for open curves, along the
  /// shorter of the two arcs for closed curves.
  double arc_distance(std::size_t i, std::size_t j) const {
    const double d = std::abs(cum_[j] - cum_[i]);
    return closed_ ? std::min(d, length_ - d) : d;
  }

  /// Same as arc_distance() but for continuous arclength parameters.
  double arc_distance_param(double s, double t) const {
    if (!closed_) return std::abs(t - s);
    double d = std::fmod(std::abs(t - s), length_);
    return std::min(d, length_ - d);
  }

  /// Linear interpolation of position at arclength s (wrapped for closed
  /// curves, clamped for open ones).
  Vector position_at(double s) const {
    const auto [i, j, f] = locate(s);
    return (1.0 - f) * point(i) + f * point(j);
  }

  /// Normalized linear interpolation of the stored tangents at arclength s.
  Vector tangent_at(double s) const {
    const auto [i, j, f] = locate(s);
    Vector t = (1.0 - f) * tangent(i) + f * tangent(j);
    const double n = t.norm();
    return n > 0 ? Vector(t / n) : Vector(tangent(i));
  }

  /// Index of the sample nearest (in arclength) to parameter s.
  std::size_t nearest_sample(double s) const {
    const auto [i, j, f] = locate(s);
    return f < 0.5 ? i : j;
  }

  double wrap_param(double s) const {
    if (!closed_) return std::clamp(s, 0.0, length_);
    s = std::fmod(s, length_);
    return s < 0 ? s + length_ : s;
  }

 private:
  friend Curve build_curve(Points, bool, std::optional<Points>);

  struct Location {
    std::size_t i, j;
    double f;
  };
  Location locate(double s) const {
    s = wrap_param(s);
    const std::size_t n = size();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    std::size_t i = static_cast<std::size_t>(std::distance(cum_.begin(), it));
    i = i == 0 ? 0 : i - 1;
    if (!closed_ && i >= n - 1) return {n - 2, n - 1, 1.0};
    const std::size_t j = (i + 1) % n;
    const double seg = (closed_ && j == 0) ? length_ - cum_[i] : cum_[j] - cum_[i];
    const double f = seg > 0 ? std::clamp((s - cum_[i]) / seg, 0.0, 1.0) : 0.0;
    return {i, j, f};
  }

  Points points_;
  Points tangents_;
  std::vector<double> cum_;
  double length_ = 0.0;
  double max_spacing_ = 0.0;
  bool closed_ = false;
};

/// Builds a curve from samples (one column per point). Missing tangents are
/// estimated by centered chord differences (one-sided at open endpoints);
/// supplied tangents are normalized.
inline Curve build_curve(Points points, bool closed,
                         std::optional<Points> tangents = std::nullopt) {
  const Eigen::Index n = points.cols();
  if (points.rows() < 2) throw InvalidInput("curve dimension must be at least 2");
  if (closed && n < 3) throw InvalidInput("closed curve needs at least 3 samples");
  if (!closed && n < 2) throw InvalidInput("open curve needs at least 2 samples");
  if (!points.allFinite()) throw InvalidInput("curve has non-finite coordinates");

  Curve c;
  c.closed_ = closed;
  c.cum_.assign(static_cast<std::size_t>(n), 0.0);
  const Eigen::Index chords = closed ? n : n - 1;
  double total = 0.0;
  for (Eigen::Index i = 0; i < chords; ++i) {
    const Eigen::Index j = (i + 1) % n;
    const double seg = (points.col(j) - points.col(i)).norm();
    if (!(seg > 0.0))
      throw InvalidInput("duplicate consecutive points at samples " + std::to_string(i) +
                         " and " + std::to_string(j));
    c.max_spacing_ = std::max(c.max_spacing_, seg);
    if (i + 1 < n) c.cum_[static_cast<std::size_t>(i + 1)] = total + seg;
    total += seg;
  }
  c.length_ = total;

  if (tangents) {
    if (tangents->rows() != points.rows() || tangents->cols() != n)
      throw InvalidInput("tangents must have the same shape as points");
    for (Eigen::Index i = 0; i < n; ++i) {
      const double norm = tangents->col(i).norm();
      if (!(norm > 0.0) || !std::isfinite(norm))
        throw InvalidInput("tangent of zero norm at sample " + std::to_string(i));
      tangents->col(i) /= norm;
    }
    c.tangents_ = std::move(*tangents);
  } else {
    c.tangents_.resize(points.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index prev = i - 1, next = i + 1;
      if (closed) {
        prev = (prev + n) % n;
        next = next % n;
      } else {
        prev = std::max<Eigen::Index>(prev, 0);
        next = std::min<Eigen::Index>(next, n - 1);
      }
      Vector t = points.col(next) - points.col(prev);
      const double norm = t.norm();
      if (!(norm > 0.0))
        throw InvalidInput("tangent of zero norm at sample " + std::to_string(i));
      c.tangents_.col(i) = t / norm;
    }
  }
  c.points_ = std::move(points);
  return c;
}

/// Returns a curve with m samples equally spaced in cumulative chord length.
/// Positions and tangents are linearly interpolated; open-curve endpoints are
/// preserved exactly.
inline Curve resample_arclength(const Curve &curve, std::size_t m) {
  const std::size_t min_samples = curve.closed() ? 3 : 2;
  if (m < min_samples)
    throw InvalidInput("resample needs at least " + std::to_string(min_samples) + " samples");
  const double step =
      curve.length() / static_cast<double>(curve.closed() ? m : m - 1);
  Points pts(curve.dim(), static_cast<Eigen::Index>(m));
  Points tan(curve.dim(), static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    if (!curve.closed() && k + 1 == m) {
      pts.col(col) = curve.point(curve.size() - 1);
      tan.col(col) = curve.tangent(curve.size() - 1);
      continue;
    }
    const double s = step * static_cast<double>(k);
    pts.col(col) = curve.position_at(s);
    tan.col(col) = curve.tangent_at(s);
  }
  return build_curve(std::move(pts), curve.closed(), std::move(tan));
}

/// Angle between the tangents at samples i and j divided by the arclength
/// between them (shorter arc for closed curves).
inline double dilation_alpha(const Curve &curve, std::size_t i, std::size_t j) {
  if (i == j) throw InvalidInput("dilation_alpha needs two distinct samples");
  return unit_angle(curve.tangent(i), curve.tangent(j)) / curve.arc_distance(i, j);
}

struct CurvatureProfile {
  std::vector<double> kappa;
  double sup_kappa = 0.0;
  /// 1 / sup_kappa, infinite for a straight curve.
  double f_k = kInf;
  double window = 0.0;
  std::size_t argmax = 0;
};

/// Default curvature window half-width: 5 mean spacings, never below the
/// 2-max-spacing minimum.
inline double default_curvature_window(const Curve &curve) {
  return std::max(5.0 * curve.mean_spacing(), 2.0 * curve.max_spacing());
}

namespace detail {
// Sample indices whose arclength lies within h of sample i, in curve order.
inline void window_indices(const Curve &curve, std::size_t i, double h,
                           std::vector<std::size_t> &out) {
  out.clear();
  const std::size_t n = curve.size();
  out.push_back(i);
  // Walk backwards then forwards; for closed curves stop before wrapping onto
  // samples already collected.
  std::vector<std::size_t> back;
  for (std::size_t step = 1; step < n; ++step) {
    if (!curve.closed() && step > i) break;
    const std::size_t j = curve.wrap(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(step));
    const double d = curve.closed() ? std::fmod(curve.arclength(i) - curve.arclength(j) + curve.length(), curve.length())
                                    : curve.arclength(i) - curve.arclength(j);
    if (d > h || (curve.closed() && 2 * step >= n)) break;
    back.push_back(j);
  }
  for (std::size_t step = 1; step < n; ++step) {
    if (!curve.closed() && i + step >= n) break;
    const std::size_t j = curve.wrap(static_cast<std::ptrdiff_t>(i + step));
    const double d = curve.closed() ? std::fmod(curve.arclength(j) - curve.arclength(i) + curve.length(), curve.length())
                                    : curve.arclength(j) - curve.arclength(i);
    if (d > h || (curve.closed() && 2 * step >= n)) break;
    out.push_back(j);
  }
  out.insert(out.begin(), back.rbegin(), back.rend());
}
}  // namespace detail

/// Windowed generalized curvature: kappa_i is the largest pairwise tangent
/// dilation among samples within arclength h of sample i.
inline CurvatureProfile curvature_profile(const Curve &curve, double h) {
  if (!(h >= 2.0 * curve.max_spacing()))
    throw InvalidInput("curvature window must be at least twice the maximum sample spacing");
  CurvatureProfile prof;
  prof.window = h;
  const std::size_t n = curve.size();
  prof.kappa.assign(n, 0.0);
  detail::parallel_chunks(n, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<std::size_t> win;
    for (std::size_t i = begin; i < end; ++i) {
      detail::window_indices(curve, i, h, win);
      double best = 0.0;
      for (std::size_t a = 0; a < win.size(); ++a)
        for (std::size_t b = a + 1; b < win.size(); ++b)
          best = std::max(best, dilation_alpha(curve, win[a], win[b]));
      prof.kappa[i] = best;
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (prof.kappa[i] > prof.sup_kappa) {
      prof.sup_kappa = prof.kappa[i];
      prof.argmax = i;
    }
  }
  prof.f_k = prof.sup_kappa > 0 ? 1.0 / prof.sup_kappa : kInf;
  return prof;
}

inline CurvatureProfile curvature_profile(const Curve &curve) {
  return curvature_profile(curve, default_curvature_window(curve));
}

/// Discrete check that the windowed curvature bound and the all-pairs
/// dilation bounds agree for a given Lambda.
struct Lemma1Report {
  double lambda = 0.0;
  double tol = 0.0;
  double sup_kappa = 0.0;
  double max_dilation_alpha = 0.0;
  double max_chord_excess = 0.0;  // max of |t_i - t_j| - Lambda * l_ij
  std::pair<std::size_t, std::size_t> worst_pair{0, 0};
  bool windowed_ok = true;
  bool pairwise_alpha_ok = true;
  bool pairwise_chord_ok = true;
  /// True when the windowed and pairwise verdicts agree.
  bool consistent() const { return windowed_ok == pairwise_alpha_ok; }
  bool all_pass() const { return windowed_ok && pairwise_alpha_ok && pairwise_chord_ok; }
  /// Name of the first failing check, empty when all pass.
  std::string failed_side() const {
    if (!windowed_ok) return "windowed";
    if (!pairwise_alpha_ok) return "pairwise_angle";
    if (!pairwise_chord_ok) return "pairwise_chord";
    return {};
  }
};

inline Lemma1Report verify_lemma1(const Curve &curve, double lambda, double tol) {
  Lemma1Report rep;
  rep.lambda = lambda;
  rep.tol = tol;
  rep.sup_kappa = curvature_profile(curve).sup_kappa;
  rep.windowed_ok = rep.sup_kappa <= lambda + tol;
  const std::size_t n = curve.size();
  rep.max_chord_excess = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double ell = curve.arc_distance(i, j);
      const double dil = unit_angle(curve.tangent(i), curve.tangent(j)) / ell;
      if (dil > rep.max_dilation_alpha) {
        rep.max_dilation_alpha = dil;
        rep.worst_pair = {i, j};
      }
      rep.max_chord_excess = std::max(
          rep.max_chord_excess, (curve.tangent(i) - curve.tangent(j)).norm() - lambda * ell);
    }
  }
  rep.pairwise_alpha_ok = rep.max_dilation_alpha <= lambda + tol;
  rep.pairwise_chord_ok = rep.max_chord_excess <= tol;
  return rep;
}

}  // namespace ropelength
