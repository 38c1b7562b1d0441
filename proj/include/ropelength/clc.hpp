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
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ropelength/curve.hpp"
#include "ropelength/thickness.hpp"

namespace ropelength {

/// Boundary data of the class C(p, q; v, w; Lambda): curves from p to q with
/// initial tangent v, final tangent w and curvature at most Lambda.
struct BoundaryData {
  Vector p, q, v, w;
  double lambda = 1.0;

  int dim() const { return static_cast<int>(p.size()); }

  void validate() const {
    const auto n = p.size();
    if (n < 2) throw InvalidInput("boundary data dimension must be at least 2");
    if (q.size() != n || v.size() != n || w.size() != n)
      throw InvalidInput("boundary data vectors differ in dimension");
    if (std::abs(v.norm() - 1.0) > 1e-12 || std::abs(w.norm() - 1.0) > 1e-12)
      throw InvalidInput("boundary tangents must be unit vectors");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("curvature bound must be positive");
  }

  /// Reverse traversal: q -> p with tangents -w -> -v.
  BoundaryData reversed() const { return {q, p, -w, -v, lambda}; }
};

namespace detail {

// Some unit vector normal to v.
inline Vector any_normal(const Vector &v) {
  Eigen::Index k = 0;
  v.cwiseAbs().minCoeff(&k);
  Vector e = Vector::Zero(v.size());
  e(k) = 1.0;
  Vector n = e - e.dot(v) * v;
  return n / n.norm();
}

inline double mod_two_pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a = 0.0;
  return a;
}

}  // namespace detail

/// Planar circular arc in R^n: starts at `start` with unit `tangent`, turns
/// towards unit `normal` (normal to tangent) through `angle` radians on a
/// circle of `radius`.
struct CircularArc {
  Vector start, tangent, normal;
  double angle = 0.0;
  double radius = 1.0;

  double length() const { return radius * angle; }
  Vector center() const { return start + radius * normal; }
  Vector position(double s) const {
    const double a = s / radius;
    return start + radius * (std::sin(a) * tangent + (1.0 - std::cos(a)) * normal);
  }
  Vector direction(double s) const {
    const double a = s / radius;
    return std::cos(a) * tangent + std::sin(a) * normal;
  }
  Vector end() const { return position(length()); }
  Vector end_tangent() const { return direction(length()); }
};

/// Circle-line-circle path: arc, tangent segment, arc, joined C^1, both arcs
/// of radius 1 / Lambda.
struct ClcPath {
  CircularArc first;
  Vector segment_start, segment_direction;
  double segment_length = 0.0;
  CircularArc second;
  double lambda = 1.0;
  /// Turn word in the plane ("LSL", "RSR", "LSR", "RSL"); empty in n >= 3.
  std::string word;

  double length() const { return first.length() + segment_length + second.length(); }
  Vector segment_end() const { return segment_start + segment_length * segment_direction; }

  Vector position(double s) const {
    s = std::clamp(s, 0.0, length());
    if (s <= first.length()) return first.position(s);
    s -= first.length();
    if (s <= segment_length) return segment_start + s * segment_direction;
    return second.position(s - segment_length);
  }
  Vector tangent(double s) const {
    s = std::clamp(s, 0.0, length());
    if (s <= first.length()) return first.direction(s);
    s -= first.length();
    if (s <= segment_length) return segment_direction;
    return second.direction(s - segment_length);
  }

  /// Largest C^0 / C^1 mismatch at the two joints.
  double joint_residual() const {
    const double r1 = (first.end() - segment_start).norm();
    const double r2 = (first.end_tangent() - segment_direction).norm();
    const double r3 = (segment_end() - second.start).norm();
    const double r4 = (segment_direction - second.tangent).norm();
    return std::max({r1, r2, r3, r4});
  }

  /// m samples uniform in arclength with exact tangents.
  Curve sample(std::size_t m) const {
    if (m < 2) throw InvalidInput("need at least two samples");
    const int n = static_cast<int>(first.start.size());
    Points pts(n, static_cast<Eigen::Index>(m)), tan(n, static_cast<Eigen::Index>(m));
    const double len = length();
    for (std::size_t k = 0; k < m; ++k) {
      const double s = len * static_cast<double>(k) / static_cast<double>(m - 1);
      pts.col(static_cast<Eigen::Index>(k)) = position(s);
      tan.col(static_cast<Eigen::Index>(k)) = tangent(s);
    }
    return build_curve(std::move(pts), false, std::move(tan));
  }
};

/// Shortest path from (p, v) to q inside the complement of O_p(v, 1/Lambda):
/// an arc of radius 1/Lambda followed by a tangent segment, in the plane
/// spanned by v and the normal part of q - p.
struct JCurve {
  enum class Kind { segment, arc, arc_then_segment };
  Kind kind = Kind::segment;
  Vector p, v, w, q;
  double radius = 1.0;
  double arc_angle = 0.0;
  double segment_length = 0.0;
  /// q - p is a negative multiple of v: any rotation about the v axis gives
  /// another shortest curve, so the returned one is a representative.
  bool multiple_solutions = false;

  double arc_length() const { return radius * arc_angle; }
  double length() const { return arc_length() + segment_length; }
  CircularArc arc() const { return {p, v, w, arc_angle, radius}; }
  /// Joint point q' where the arc meets the segment.
  Vector joint() const { return arc().end(); }

  Vector position(double s) const {
    s = std::clamp(s, 0.0, length());
    const CircularArc a = arc();
    if (s <= a.length()) return a.position(s);
    return a.end() + (s - a.length()) * a.end_tangent();
  }
  Vector tangent(double s) const {
    s = std::clamp(s, 0.0, length());
    const CircularArc a = arc();
    if (s <= a.length()) return a.direction(s);
    return a.end_tangent();
  }
  Curve sample(std::size_t m) const {
    if (m < 2) throw InvalidInput("need at least two samples");
    const int n = static_cast<int>(p.size());
    Points pts(n, static_cast<Eigen::Index>(m)), tan(n, static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
      const double s = length() * static_cast<double>(k) / static_cast<double>(m - 1);
      pts.col(static_cast<Eigen::Index>(k)) = position(s);
      tan.col(static_cast<Eigen::Index>(k)) = tangent(s);
    }
    return build_curve(std::move(pts), false, std::move(tan));
  }
};

inline JCurve shortest_to_target_in_complement(const Vector &p, const Vector &v, const Vector &q,
                                               double lambda) {
  if (p.size() != v.size() || p.size() != q.size())
    throw InvalidInput("point, tangent and target differ in dimension");
  if (std::abs(v.norm() - 1.0) > 1e-12) throw InvalidInput("tangent must be a unit vector");
  if (!(lambda > 0.0)) throw InvalidInput("curvature bound must be positive");
  const double radius = 1.0 / lambda;
  if (obstacle_contains(ObstacleSpec{p, v, radius}, q))
    throw InvalidInput("target lies inside the forbidden region O_p(v, 1/Lambda)");

  // Work at unit curvature: x along v, y along the normal part of q - p.
  const Vector d = (q - p) * lambda;
  if (!(d.norm() > 0.0)) throw InvalidInput("target coincides with the start point");
  const double x = d.dot(v);
  const Vector dn = d - x * v;
  const double y = dn.norm();
  const double eps = 1e-12 * std::max(1.0, d.norm());

  JCurve j;
  j.p = p;
  j.v = v;
  j.q = q;
  j.radius = radius;
  if (y <= eps && x > 0) {
    j.kind = JCurve::Kind::segment;
    j.w = detail::any_normal(v);
    j.segment_length = x * radius;
    return j;
  }
  if (y <= eps) {
    j.multiple_solutions = true;
    j.w = detail::any_normal(v);
  } else {
    j.w = dn / y;
  }
  const double yy = y <= eps ? 0.0 : y;
  // Circle centre at (0, 1); |Q - C|^2 = 1 + l^2 for the tangent length l.
  const double dist2 = x * x + (yy - 1.0) * (yy - 1.0);
  const double ell = std::sqrt(std::max(0.0, dist2 - 1.0));
  if (ell <= 1e-12 * std::max(1.0, d.norm())) {
    j.kind = JCurve::Kind::arc;
    j.arc_angle = detail::mod_two_pi(std::atan2(x, 1.0 - yy));
    j.segment_length = 0.0;
    return j;
  }
  j.kind = JCurve::Kind::arc_then_segment;
  j.arc_angle = detail::mod_two_pi(std::atan2(yy - 1.0, x) + 0.5 * kPi - std::atan2(ell, 1.0));
  j.segment_length = ell * radius;
  return j;
}

struct CscOptions {
  std::uint64_t seed = 0;
  int deterministic_seeds = 8;
  int random_seeds = 8;
  /// Joint residual accepted for a converged candidate.
  double joint_tol = 1e-9;
};

namespace detail {

inline Eigen::Vector2d left_normal(const Eigen::Vector2d &v) { return {-v.y(), v.x()}; }

inline double heading(const Eigen::Vector2d &v) { return std::atan2(v.y(), v.x()); }

// Planar CSC candidates at unit radius for data already scaled so Lambda = 1.
// sigma = +1 turns left, -1 turns right.
struct PlanarCsc {
  double theta1, ell, theta2;
  double sigma1, sigma2;
  Eigen::Vector2d u;
};

inline std::vector<PlanarCsc> planar_csc_unit(const Eigen::Vector2d &p, const Eigen::Vector2d &v,
                                              const Eigen::Vector2d &q, const Eigen::Vector2d &w) {
  std::vector<PlanarCsc> out;
  for (double s1 : {1.0, -1.0}) {
    for (double s2 : {1.0, -1.0}) {
      const Eigen::Vector2d c1 = p + s1 * left_normal(v);
      const Eigen::Vector2d c2 = q + s2 * left_normal(w);
      const Eigen::Vector2d dc = c2 - c1;
      const double k = s1 - s2;  // 0 or +-2
      const double dist2 = dc.squaredNorm();
      if (dist2 < k * k) continue;
      const double ell = std::sqrt(dist2 - k * k);
      double psi;
      if (dist2 == 0.0) {
        psi = heading(v);  // concentric same-direction circles: no segment
      } else {
        psi = std::atan2(dc.y(), dc.x()) + std::atan2(k, ell);
      }
      const Eigen::Vector2d u(std::cos(psi), std::sin(psi));
      PlanarCsc c;
      c.theta1 = mod_two_pi(s1 * (psi - heading(v)));
      c.theta2 = mod_two_pi(s2 * (heading(w) - psi));
      c.ell = ell;
      c.sigma1 = s1;
      c.sigma2 = s2;
      c.u = u;
      out.push_back(c);
    }
  }
  return out;
}

// First arc from (p, v) to heading u; `long_way` takes the 2 pi - angle branch.
struct ArcEnd {
  Vector end, normal;
  double angle;
};

inline ArcEnd arc_to_heading(const Vector &p, const Vector &v, const Vector &u, bool long_way) {
  ArcEnd a;
  a.angle = unit_angle(v, u);
  Vector nrm = u - u.dot(v) * v;
  const double nn = nrm.norm();
  a.normal = nn > 1e-14 ? Vector(nrm / nn) : any_normal(v);
  if (long_way) {
    a.angle = 2.0 * kPi - a.angle;
    a.normal = -a.normal;
  }
  a.end = p + std::sin(a.angle) * v + (1.0 - std::cos(a.angle)) * a.normal;
  return a;
}

// Second arc from heading u to (q, w), returned by its start point.
inline ArcEnd arc_from_heading(const Vector &q, const Vector &w, const Vector &u, bool long_way) {
  ArcEnd a;
  a.angle = unit_angle(u, w);
  Vector nrm = w - w.dot(u) * u;
  const double nn = nrm.norm();
  a.normal = nn > 1e-14 ? Vector(nrm / nn) : any_normal(u);
  if (long_way) {
    a.angle = 2.0 * kPi - a.angle;
    a.normal = -a.normal;
  }
  a.end = q - (std::sin(a.angle) * u + (1.0 - std::cos(a.angle)) * a.normal);
  return a;
}

inline Vector joint_gap(const Vector &p, const Vector &v, const Vector &q, const Vector &w,
                        const Vector &u, bool long1, bool long2) {
  const ArcEnd a = arc_to_heading(p, v, u, long1);
  const ArcEnd b = arc_from_heading(q, w, u, long2);
  const Vector gap = b.end - a.end;
  return gap - gap.dot(u) * u;
}

// Orthonormal basis of u's normal space, one column per direction.
inline Eigen::MatrixXd normal_basis(const Vector &u) {
  const Eigen::Index n = u.size();
  Eigen::MatrixXd full(n, n);
  full.col(0) = u;
  full.rightCols(n - 1) = Eigen::MatrixXd::Identity(n, n).rightCols(n - 1);
  Eigen::Index k = 0;
  u.cwiseAbs().maxCoeff(&k);
  // Replace the identity column most aligned with u by e_0 so the set spans.
  if (k != 0) full.col(k) = Eigen::MatrixXd::Identity(n, n).col(0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(full);
  Eigen::MatrixXd qmat = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return qmat.rightCols(n - 1);
}

// Levenberg-Marquardt on the sphere for the tangent-segment direction u.
inline std::optional<Vector> solve_segment_direction(const Vector &p, const Vector &v,
                                                     const Vector &q, const Vector &w, Vector u,
                                                     bool long1, bool long2) {
  u.normalize();
  double mu = 1e-6;
  Vector f = joint_gap(p, v, q, w, u, long1, long2);
  double fn = f.norm();
  const double scale = std::max(1.0, (q - p).norm());
  for (int it = 0; it < 200; ++it) {
    if (fn < 1e-14 * scale) return u;
    const Eigen::MatrixXd e = normal_basis(u);
    const Eigen::Index m = e.cols();
    Eigen::MatrixXd jac(u.size(), m);
    const double h = 1e-7;
    for (Eigen::Index c = 0; c < m; ++c) {
      const Vector up = (u + h * e.col(c)).normalized();
      const Vector um = (u - h * e.col(c)).normalized();
      jac.col(c) = (joint_gap(p, v, q, w, up, long1, long2) -
                    joint_gap(p, v, q, w, um, long1, long2)) / (2 * h);
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Vector grad = jac.transpose() * f;
    bool improved = false;
    for (int damp = 0; damp < 40; ++damp) {
      const Eigen::MatrixXd a = jtj + mu * Eigen::MatrixXd::Identity(m, m) * std::max(1.0, jtj.trace());
      Vector step = -a.ldlt().solve(grad);
      if (step.norm() > 0.5) step *= 0.5 / step.norm();
      const Vector trial = (u + e * step).normalized();
      const Vector tf = joint_gap(p, v, q, w, trial, long1, long2);
      if (tf.norm() < fn) {
        u = trial;
        f = tf;
        fn = tf.norm();
        mu = std::max(mu * 0.2, 1e-15);
        improved = true;
        break;
      }
      mu *= 8.0;
    }
    if (!improved) break;
  }
  if (fn < 1e-11 * scale) return u;
  return std::nullopt;
}

inline ClcPath build_path(const Vector &p, const Vector &v, const Vector &q, const Vector &w,
                          const Vector &u, bool long1, bool long2) {
  const ArcEnd a = arc_to_heading(p, v, u, long1);
  const ArcEnd b = arc_from_heading(q, w, u, long2);
  ClcPath path;
  path.first = {p, v, a.normal, a.angle, 1.0};
  path.segment_start = a.end;
  path.segment_direction = u;
  path.segment_length = std::max(0.0, (b.end - a.end).dot(u));
  path.second = {path.segment_end(), u, b.normal, b.angle, 1.0};
  return path;
}

// Rescales a unit-radius path to radius 1 / lambda about the origin offset.
inline ClcPath unscale(ClcPath path, const Vector &origin, double lambda) {
  const double r = 1.0 / lambda;
  auto fix_arc = [&](CircularArc &a) {
    a.start = origin + a.start * r;
    a.radius = r;
  };
  fix_arc(path.first);
  path.segment_start = origin + path.segment_start * r;
  path.segment_length *= r;
  fix_arc(path.second);
  path.lambda = lambda;
  return path;
}

inline bool same_path(const ClcPath &a, const ClcPath &b, double tol) {
  if (std::abs(a.length() - b.length()) > tol) return false;
  for (double f : {0.1, 0.3, 0.5, 0.7, 0.9})
    if ((a.position(f * a.length()) - b.position(f * b.length())).norm() > tol) return false;
  return true;
}

}  // namespace detail

/// All CLC paths meeting the boundary data, sorted by length. Closed form in
/// the plane; multi-start root finding on the segment direction in n >= 3.
inline std::vector<ClcPath> csc_candidates(const BoundaryData &b, const CscOptions &opts = {}) {
  b.validate();
  const double lambda = b.lambda;
  const Vector origin = b.p;
  // Unit-curvature frame: positions relative to p, scaled by Lambda.
  const Vector p = Vector::Zero(b.dim());
  const Vector q = (b.q - b.p) * lambda;
  const Vector &v = b.v;
  const Vector &w = b.w;

  std::vector<ClcPath> raw;
  if (b.dim() == 2) {
    for (const auto &c : detail::planar_csc_unit(p, v, q, w)) {
      ClcPath path;
      const Eigen::Vector2d n1 = c.sigma1 * detail::left_normal(v);
      const Eigen::Vector2d n2 = c.sigma2 * detail::left_normal(c.u);
      path.first = {p, v, Vector(n1), c.theta1, 1.0};
      path.segment_start = path.first.end();
      path.segment_direction = c.u;
      path.segment_length = c.ell;
      path.second = {path.segment_end(), Vector(c.u), Vector(n2), c.theta2, 1.0};
      path.word = std::string(c.sigma1 > 0 ? "L" : "R") + "S" + (c.sigma2 > 0 ? "L" : "R");
      raw.push_back(std::move(path));
    }
  } else {
    std::vector<Vector> seeds;
    // Planar solutions in the plane that best fits {v, w, q - p}.
    Eigen::MatrixXd span(b.dim(), 3);
    span.col(0) = v;
    span.col(1) = w;
    span.col(2) = q.norm() > 0 ? Vector(q / q.norm()) : v;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(span, Eigen::ComputeThinU);
    const Eigen::MatrixXd plane = svd.matrixU().leftCols(2);
    const Eigen::Vector2d v2 = plane.transpose() * v, w2 = plane.transpose() * w;
    if (v2.norm() > 1e-9 && w2.norm() > 1e-9) {
      for (const auto &c : detail::planar_csc_unit(Eigen::Vector2d::Zero(), v2.normalized(),
                                                   plane.transpose() * q, w2.normalized()))
        seeds.push_back((plane * c.u).normalized());
    }
    for (const Vector &s : {Vector(q), Vector(v), Vector(w), Vector(v + w), Vector(v - w), Vector(-v)})
      if (static_cast<int>(seeds.size()) < opts.deterministic_seeds && s.norm() > 1e-12)
        seeds.push_back(s.normalized());
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;
    for (int k = 0; k < opts.random_seeds; ++k) {
      Vector r(b.dim());
      for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = gauss(rng);
      seeds.push_back(r.normalized());
    }
    for (const Vector &seed : seeds) {
      for (bool long1 : {false, true}) {
        for (bool long2 : {false, true}) {
          auto u = detail::solve_segment_direction(p, v, q, w, seed, long1, long2);
          if (!u) continue;
          ClcPath path = detail::build_path(p, v, q, w, *u, long1, long2);
          const Vector gap = path.second.start - path.segment_start;
          if (gap.dot(*u) < -1e-9) continue;  // segment would run backwards
          raw.push_back(std::move(path));
        }
      }
    }
  }

  std::vector<ClcPath> out;
  for (auto &path : raw) {
    const CircularArc &s2 = path.second;
    const double end_gap = std::max((s2.end() - q).norm(), (s2.end_tangent() - w).norm());
    if (path.joint_residual() > opts.joint_tol || end_gap > opts.joint_tol) continue;
    if (path.first.angle >= 2.0 * kPi || path.second.angle >= 2.0 * kPi) continue;
    bool dup = false;
    for (const auto &k : out)
      if (detail::same_path(k, path, 1e-7)) dup = true;
    if (!dup) out.push_back(std::move(path));
  }
  for (auto &path : out) path = detail::unscale(std::move(path), origin, lambda);
  std::sort(out.begin(), out.end(), [](const ClcPath &x, const ClcPath &y) {
    if (x.length() != y.length()) return x.length() < y.length();
    if (x.first.angle != y.first.angle) return x.first.angle < y.first.angle;
    if (x.segment_length != y.segment_length) return x.segment_length < y.segment_length;
    return x.second.angle < y.second.angle;
  });
  return out;
}

}  // namespace ropelength
