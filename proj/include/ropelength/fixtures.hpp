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
#include <functional>
#include <numeric>
#include <vector>

#include "ropelength/clc.hpp"
#include "ropelength/curve.hpp"

// Analytic curves sampled uniformly in arclength, with exact tangents.
namespace ropelength::fixtures {

namespace detail {

inline void require(bool ok, const char *what) {
  if (!ok) throw InvalidInput(what);
}

inline std::size_t min_samples(bool closed) { return closed ? 3 : 2; }

}  // namespace detail

/// Samples f on [0, period] at n points uniform in arclength. `df` is the
/// derivative of f. Closed curves omit the endpoint t = period.
inline Curve sample_parametric(const std::function<Vector(double)> &f, const std::function<Vector(double)> &df,
                               double period, std::size_t n, bool closed) {
  detail::require(n >= detail::min_samples(closed), "too few samples");
  // Cumulative arclength on a fine grid by Simpson's rule, then Newton on
  // each arclength target.
  const std::size_t fine = std::max<std::size_t>(64 * n, 4096);
  const double dt = period / static_cast<double>(fine);
  std::vector<double> cum(fine + 1, 0.0);
  for (std::size_t k = 0; k < fine; ++k) {
    const double t = dt * static_cast<double>(k);
    cum[k + 1] = cum[k] + dt / 6.0 * (df(t).norm() + 4.0 * df(t + 0.5 * dt).norm() + df(t + dt).norm());
  }
  const double total = cum.back();
  const std::size_t intervals = closed ? n : n - 1;
  const int dim = static_cast<int>(f(0.0).size());
  Points pts(dim, static_cast<Eigen::Index>(n)), tan(dim, static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(intervals);
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cum.begin() - 1, 0)),
                                          fine - 1);
    double t = dt * static_cast<double>(j);
    double s = cum[j];
    for (int iter = 0; iter < 20; ++iter) {
      // Arclength from the grid point by 4-point Gauss-Legendre.
      static constexpr double xg[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                       0.8611363115940526};
      static constexpr double wg[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                       0.3478548451374538};
      const double t0 = dt * static_cast<double>(j), half = 0.5 * (t - t0);
      double seg = 0.0;
      for (int g = 0; g < 4; ++g) seg += wg[g] * df(t0 + half * (1.0 + xg[g])).norm();
      s = cum[j] + half * seg;
      const double speed = df(t).norm();
      const double step = (target - s) / speed;
      t += step;
      if (std::abs(step) < 1e-15 * std::max(1.0, period)) break;
    }
    if (!closed && k == n - 1) t = period;
    pts.col(static_cast<Eigen::Index>(k)) = f(t);
    tan.col(static_cast<Eigen::Index>(k)) = df(t).normalized();
  }
  return build_curve(std::move(pts), closed, std::move(tan));
}

/// Circle of radius r in the plane; samples form a regular n-gon.
inline Curve circle(double r, std::size_t n, double cx = 0.0, double cy = 0.0) {
  detail::require(r > 0, "circle radius must be positive");
  detail::require(n >= 3, "too few samples");
  Points pts(2, static_cast<Eigen::Index>(n)), tan(2, static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    pts.col(static_cast<Eigen::Index>(k)) << cx + r * std::cos(a), cy + r * std::sin(a);
    tan.col(static_cast<Eigen::Index>(k)) << -std::sin(a), std::cos(a);
  }
  return build_curve(std::move(pts), true, std::move(tan));
}

inline Curve ellipse(double a, double b, std::size_t n) {
  detail::require(a > 0 && b > 0, "ellipse semi-axes must be positive");
  const auto f = [=](double t) {
    Vector p(2);
    p << a * std::cos(t), b * std::sin(t);
    return p;
  };
  const auto df = [=](double t) {
    Vector p(2);
    p << -a * std::sin(t), b * std::cos(t);
    return p;
  };
  return sample_parametric(f, df, 2.0 * kPi, n, true);
}

/// Planar path of straight pieces and circular arcs traced from a start pose.
class Turtle {
 public:
  Turtle(double x = 0.0, double y = 0.0, double heading = 0.0) : x_(x), y_(y), heading_(heading) {}

  Turtle &forward(double len) {
    detail::require(len >= 0, "segment length must be non-negative");
    pieces_.push_back({x_, y_, heading_, len, 0.0});
    x_ += len * std::cos(heading_);
    y_ += len * std::sin(heading_);
    return *this;
  }
  /// Arc of the given radius turning by `angle` (positive turns left).
  Turtle &turn(double radius, double angle) {
    detail::require(radius > 0, "arc radius must be positive");
    const double len = radius * std::abs(angle);
    const double k = angle >= 0 ? 1.0 / radius : -1.0 / radius;
    pieces_.push_back({x_, y_, heading_, len, k});
    const Eigen::Vector2d end = position(pieces_.back(), len);
    x_ = end.x();
    y_ = end.y();
    heading_ += angle;
    return *this;
  }

  double length() const {
    double total = 0.0;
    for (const auto &p : pieces_) total += p.len;
    return total;
  }

  /// n samples uniform in arclength; closed paths omit the duplicate end.
  Curve sample(std::size_t n, bool closed) const {
    detail::require(n >= detail::min_samples(closed), "too few samples");
    const double total = length();
    detail::require(total > 0, "empty path");
    const std::size_t intervals = closed ? n : n - 1;
    Points pts(2, static_cast<Eigen::Index>(n)), tan(2, static_cast<Eigen::Index>(n));
    std::size_t piece = 0;
    double offset = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = total * static_cast<double>(k) / static_cast<double>(intervals);
      while (piece + 1 < pieces_.size() && s > offset + pieces_[piece].len) offset += pieces_[piece++].len;
      const Piece &p = pieces_[piece];
      const double local = std::clamp(s - offset, 0.0, p.len);
      pts.col(static_cast<Eigen::Index>(k)) = position(p, local);
      const double h = p.heading + p.curvature * local;
      tan.col(static_cast<Eigen::Index>(k)) << std::cos(h), std::sin(h);
    }
    return build_curve(std::move(pts), closed, std::move(tan));
  }

 private:
  struct Piece {
    double x, y, heading, len, curvature;
  };
  static Eigen::Vector2d position(const Piece &p, double s) {
    if (p.curvature == 0.0) return {p.x + s * std::cos(p.heading), p.y + s * std::sin(p.heading)};
    const double r = 1.0 / p.curvature, h = p.heading + p.curvature * s;
    return {p.x + r * (std::sin(h) - std::sin(p.heading)), p.y - r * (std::cos(h) - std::cos(p.heading))};
  }

  double x_, y_, heading_;
  std::vector<Piece> pieces_;
};

/// Two parallel segments of length `straight` capped by semicircles of
/// radius r.
inline Curve stadium(double r, double straight, std::size_t n) {
  detail::require(r > 0 && straight >= 0, "invalid stadium parameters");
  Turtle t(-0.5 * straight, -r, 0.0);
  t.forward(straight).turn(r, kPi).forward(straight).turn(r, kPi);
  return t.sample(n, true);
}

/// Square with sides of length `side` joined by quarter circles of radius r.
inline Curve rounded_square(double r, double side, std::size_t n) {
  detail::require(r > 0 && side >= 0, "invalid rounded square parameters");
  Turtle t(-0.5 * side, -0.5 * side - r, 0.0);
  for (int k = 0; k < 4; ++k) t.forward(side).turn(r, 0.5 * kPi);
  return t.sample(n, true);
}

/// The part of the circle (x - eps)^2 + y^2 = 1 outside the closed unit disc,
/// as an open arc with end points on the unit circle.
inline Curve example1_offset_circle(double eps, std::size_t n) {
  detail::require(eps > 0 && eps < 2, "offset must lie in (0, 2)");
  const double half = 0.5 * kPi + std::asin(0.5 * eps);
  const auto f = [=](double t) {
    Vector p(2);
    p << eps + std::cos(t - half), std::sin(t - half);
    return p;
  };
  const auto df = [=](double t) {
    Vector p(2);
    p << -std::sin(t - half), std::cos(t - half);
    return p;
  };
  return sample_parametric(f, df, 2.0 * half, n, false);
}

/// Exact length of the exterior arc above: pi + 2 asin(eps / 2).
inline double example1_exterior_length(double eps) { return kPi + 2.0 * std::asin(0.5 * eps); }

/// (p, q) torus knot on the torus with radii big > small.
inline Curve torus_knot(int p, int q, double big, double small, std::size_t n) {
  detail::require(p > 0 && q > 0 && std::gcd(p, q) == 1, "torus knot needs coprime positive p, q");
  detail::require(big > small && small > 0, "torus radii must satisfy big > small > 0");
  const auto f = [=](double t) {
    const double rr = big + small * std::cos(q * t);
    Vector x(3);
    x << rr * std::cos(p * t), rr * std::sin(p * t), small * std::sin(q * t);
    return x;
  };
  const auto df = [=](double t) {
    const double rr = big + small * std::cos(q * t), drr = -small * q * std::sin(q * t);
    Vector x(3);
    x << drr * std::cos(p * t) - p * rr * std::sin(p * t), drr * std::sin(p * t) + p * rr * std::cos(p * t),
        small * q * std::cos(q * t);
    return x;
  };
  return sample_parametric(f, df, 2.0 * kPi, n, true);
}

/// Unit circle pushed outward by amplitude * (1 - x^2)^3 with x the angle from
/// +e1 divided by `width` (radians); C^2 with compact support.
inline Curve bumped_circle(double amplitude, double width, std::size_t n) {
  detail::require(width > 0 && width < kPi, "bump width must lie in (0, pi)");
  detail::require(amplitude > -1, "bump amplitude must exceed -1");
  const auto radius = [=](double t) {
    const double x = std::remainder(t, 2.0 * kPi) / width;
    if (std::abs(x) >= 1) return std::pair{1.0, 0.0};
    const double b = 1 - x * x;
    return std::pair{1.0 + amplitude * b * b * b, amplitude * 3 * b * b * (-2 * x) / width};
  };
  const auto f = [=](double t) {
    const double r = radius(t).first;
    Vector p(2);
    p << r * std::cos(t), r * std::sin(t);
    return p;
  };
  const auto df = [=](double t) {
    const auto [r, dr] = radius(t);
    Vector p(2);
    p << dr * std::cos(t) - r * std::sin(t), dr * std::sin(t) + r * std::cos(t);
    return p;
  };
  return sample_parametric(f, df, 2.0 * kPi, n, true);
}

/// A CLC path sampled at n points with exact tangents.
inline Curve clc(const ClcPath &path, std::size_t n) { return path.sample(n); }

}  // namespace ropelength::fixtures
