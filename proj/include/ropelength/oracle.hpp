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
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "ropelength/clc.hpp"
#include "ropelength/curve.hpp"
#include "ropelength/detail/lbfgs.hpp"

namespace ropelength {

/// Raised when no restart of the discrete oracle reaches a feasible polyline.
class InfeasibleProblem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleOptions {
  /// Number of polyline segments (M >= 16).
  std::size_t segments = 128;
  /// Inner L-BFGS iteration budget per augmented-Lagrangian round.
  int iters = 100;
  std::uint64_t seed = 0;
  int restarts = 8;
  /// Leave the final direction free (used for the arc-then-segment check).
  bool one_sided = false;
  /// Accepted constraint violation, in unit-curvature length units.
  double feasibility_tol = 1e-8;
};

struct OracleResult {
  /// Open polyline with M + 1 vertices from p to q.
  Curve polyline;
  double length = 0.0;
  /// Turning angle at each vertex, including the two end clamps.
  std::vector<double> turning;
  /// Turning budget Lambda * h at interior vertices (h = segment length).
  double turning_budget = 0.0;
  /// Smallest interior turning / budget.
  double min_saturation = 0.0;
  /// Fraction of interior joints turning by at least 95% of the budget.
  /// Inflection joints, where the turning direction flips, fall below it.
  double saturated_fraction = 0.0;
  double constraint_violation = 0.0;
  int restart = -1;
  int feasible_restarts = 0;
};

namespace detail {

// Discretization: M equal segments of length h = L / M with unit directions
// u_0..u_{M-1}, built by successive turns from v. Turn k rotates u_{k-1}
// towards the component of d_k normal to it by beta * sin|d_k|, so the bound
// |turn| <= beta holds for every parameter value and saturation is a regular
// critical point. Interior joints have beta = Lambda * h (curvature bound times
// the mean adjacent segment length); the end directions act as zero-length
// clamped segments with beta = Lambda * h / 2. Only the endpoint and the final
// clamp remain as constraints.
class OracleProblem {
 public:
  OracleProblem(const Vector &disp, const Vector &v, const Vector &w, std::size_t m, bool one_sided)
      : disp_(disp), v_(v), w_(w), m_(m), n_(disp.size()), one_sided_(one_sided),
        lambda_e_(Vector::Zero(disp.size())) {}

  Eigen::Index size() const { return 1 + static_cast<Eigen::Index>(m_) * n_; }
  double length(const Vector &x) const { return std::exp(x(0)); }

  struct Path {
    double h = 0.0;
    Points u, q;  // n x M
    std::vector<double> theta, r, beta;
    Vector end;
    double end_gap = 0.0;  // cos(h/2) - u_{M-1}.w, feasible when <= 0
  };

  static double budget(double b) { return std::min(b, kPi); }

  auto turn(const Vector &x, std::size_t k) const {
    return x.segment(1 + static_cast<Eigen::Index>(k) * n_, n_);
  }

  Path trace(const Vector &x) const {
    Path path;
    path.h = length(x) / static_cast<double>(m_);
    const auto mi = static_cast<Eigen::Index>(m_);
    path.u.resize(n_, mi);
    path.q.resize(n_, mi);
    path.theta.resize(m_);
    path.r.resize(m_);
    path.beta.resize(m_);
    Vector prev = v_, p(n_);
    for (std::size_t k = 0; k < m_; ++k) {
      const auto ki = static_cast<Eigen::Index>(k);
      const auto d = turn(x, k);
      p = d - d.dot(prev) * prev;
      const double r = p.norm();
      const double beta = budget(k == 0 ? 0.5 * path.h : path.h);
      const double theta = beta * std::sin(r);
      if (r > 1e-300)
        path.q.col(ki) = p / r;
      else
        path.q.col(ki) = any_normal(prev);
      prev = std::cos(theta) * prev + std::sin(theta) * path.q.col(ki);
      prev.normalize();
      path.u.col(ki) = prev;
      path.theta[k] = theta;
      path.r[k] = r;
      path.beta[k] = beta;
    }
    path.end = path.h * path.u.rowwise().sum();
    path.end_gap = one_sided_ ? -1.0 : std::cos(budget(0.5 * path.h)) - prev.dot(w_);
    return path;
  }

  double violation(const Vector &x) const {
    const Path path = trace(x);
    return std::max((path.end - disp_).lpNorm<Eigen::Infinity>(), path.end_gap);
  }

  double value_and_gradient(const Vector &x, Vector &grad) const {
    const Path path = trace(x);
    const double len = length(x), h = path.h;
    const Vector e = path.end - disp_;
    const Vector e_coef = lambda_e_ + mu_ * e;
    double f = len + lambda_e_.dot(e) + 0.5 * mu_ * e.squaredNorm();
    double w_coef = 0.0;
    if (!one_sided_) {
      const double shifted = std::max(0.0, lambda_w_ + mu_ * path.end_gap);
      f += (shifted * shifted - lambda_w_ * lambda_w_) / (2.0 * mu_);
      w_coef = shifted;
    }

    grad.resize(size());
    double h_bar = (e_coef.transpose() * path.u).sum();
    double beta_half_bar = 0.0, beta_full_bar = 0.0;

    // Reverse sweep through the chain of turns.
    Vector u_bar = -w_coef * w_, tang(n_), p_bar(n_);
    for (std::size_t k = m_; k-- > 0;) {
      const auto ki = static_cast<Eigen::Index>(k);
      u_bar += h * e_coef;
      const Eigen::Ref<const Vector> prev = k == 0 ? Eigen::Ref<const Vector>(v_) : path.u.col(ki - 1);
      const auto q = path.q.col(ki);
      const double theta = path.theta[k], r = path.r[k], beta = path.beta[k];
      const double ct = std::cos(theta), st = std::sin(theta);
      const double theta_bar = ct * u_bar.dot(q) - st * u_bar.dot(prev);
      (k == 0 ? beta_half_bar : beta_full_bar) += theta_bar * std::sin(r);
      const double r_bar = theta_bar * beta * std::cos(r);
      // d(sin(theta) q)/dp with q = p / r, finite as r -> 0.
      const double s_over_r = r > 1e-12 ? st / r : beta;
      tang = u_bar - u_bar.dot(q) * q;
      p_bar = s_over_r * tang + r_bar * q;
      const auto d = turn(x, k);
      const double pu = p_bar.dot(prev);
      grad.segment(1 + ki * n_, n_) = p_bar - pu * prev;
      u_bar = ct * u_bar - d.dot(prev) * p_bar - pu * d;
    }
    if (0.5 * h < kPi) h_bar += 0.5 * beta_half_bar;
    if (h < kPi) h_bar += beta_full_bar;
    if (!one_sided_ && 0.5 * h < kPi) h_bar += w_coef * -std::sin(0.5 * h) * 0.5;
    grad(0) = len + h_bar * h;
    return f;
  }

  void update_multipliers(const Vector &x) {
    const Path path = trace(x);
    lambda_e_ += mu_ * (path.end - disp_);
    if (!one_sided_) lambda_w_ = std::max(0.0, lambda_w_ + mu_ * path.end_gap);
  }
  double mu() const { return mu_; }
  void set_mu(double mu) { mu_ = mu; }

 private:
  Vector disp_, v_, w_;
  std::size_t m_;
  Eigen::Index n_;
  bool one_sided_;
  Vector lambda_e_;
  double lambda_w_ = 0.0;
  double mu_ = 10.0;
};

// Cubic Bezier initial guess with randomized handle lengths and offsets. The
// turn parameters track the Bezier headings as closely as the budget allows.
inline Vector oracle_initial_guess(const Vector &disp, const Vector &v, const Vector &w, std::size_t m,
                                   std::mt19937_64 &rng, int restart) {
  const Eigen::Index n = disp.size();
  const double scale = std::max(disp.norm(), 2.0);
  std::uniform_real_distribution<double> unif(0.3, 2.5);
  std::normal_distribution<double> gauss;
  double a = 0.4 * scale, b = 0.4 * scale;
  Vector off1 = Vector::Zero(n), off2 = Vector::Zero(n);
  if (restart > 0) {
    a = unif(rng) * scale;
    b = unif(rng) * scale;
    for (Eigen::Index i = 0; i < n; ++i) {
      off1(i) = gauss(rng);
      off2(i) = gauss(rng);
    }
    off1 *= 0.6 * scale;
    off2 *= 0.6 * scale;
  }
  const Vector p1 = a * v + off1, p2 = disp - b * w + off2;
  const auto bezier = [&](double t) -> Vector {
    const double s = 1.0 - t;
    return 3 * s * s * t * p1 + 3 * s * t * t * p2 + t * t * t * disp;
  };
  const int dense = static_cast<int>(16 * m);
  std::vector<Vector> pts(static_cast<std::size_t>(dense) + 1);
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    pts[k] = bezier(static_cast<double>(k) / dense);
    if (k > 0) cum[k] = cum[k - 1] + (pts[k] - pts[k - 1]).norm();
  }
  const double len = std::max(cum.back(), 1e-3);
  const double h = len / static_cast<double>(m);
  Vector x(1 + static_cast<Eigen::Index>(m) * n);
  x(0) = std::log(len);
  std::size_t j = 0;
  Vector prev = v;
  for (std::size_t k = 0; k < m; ++k) {
    const double target = len * (static_cast<double>(k) + 0.5) / static_cast<double>(m);
    while (j + 2 < cum.size() && cum[j + 1] < target) ++j;
    Vector dir = pts[j + 1] - pts[j];
    if (dir.norm() < 1e-12) dir = prev;
    dir.normalize();
    Vector normal = dir - dir.dot(prev) * prev;
    if (normal.norm() < 1e-9) normal = any_normal(prev);
    normal.normalize();
    const double beta = std::min(k == 0 ? 0.5 * h : h, kPi);
    const double want = std::min(unit_angle(prev, dir), 0.95 * beta);
    const double r = std::asin(want / beta) + 1e-3 * std::abs(gauss(rng));
    x.segment(1 + static_cast<Eigen::Index>(k) * n, n) = r * normal;
    prev = (std::cos(beta * std::sin(r)) * prev + std::sin(beta * std::sin(r)) * normal).normalized();
  }
  return x;
}

}  // namespace detail

/// Shortest M-segment polyline from (p, v) to (q, w) under the discrete
/// curvature bound, by augmented-Lagrangian descent with seeded random
/// restarts. Independent of the closed-form CLC construction.
inline OracleResult discrete_shortest_oracle(const BoundaryData &b, const OracleOptions &opts = {}) {
  b.validate();
  if (opts.segments < 16) throw InvalidInput("oracle needs at least 16 segments");
  const std::size_t m = opts.segments;
  const Vector disp = (b.q - b.p) * b.lambda;
  std::mt19937_64 rng(opts.seed);

  std::optional<Vector> best_x;
  double best_len = kInf, best_violation = kInf;
  int best_restart = -1, feasible = 0;
  const detail::OracleProblem shape(disp, b.v, b.w, m, opts.one_sided);
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    detail::OracleProblem prob(disp, b.v, b.w, m, opts.one_sided);
    Vector x = detail::oracle_initial_guess(disp, b.v, b.w, m, rng, r);
    double prev_violation = kInf;
    for (int outer = 0; outer < 30; ++outer) {
      detail::LbfgsOptions lo;
      lo.max_iterations = opts.iters;
      lo.gradient_tol = 1e-11;
      detail::lbfgs_minimize([&](const Vector &xx, Vector &g) { return prob.value_and_gradient(xx, g); },
                             x, lo);
      const double viol = prob.violation(x);
      prob.update_multipliers(x);
      if (viol < opts.feasibility_tol && outer > 1) break;
      if (viol > 0.25 * prev_violation) prob.set_mu(std::min(prob.mu() * 4.0, 1e8));
      prev_violation = viol;
    }
    const double viol = prob.violation(x);
    if (viol > opts.feasibility_tol) continue;
    ++feasible;
    const double len = std::exp(x(0));
    if (len < best_len) {
      best_len = len;
      best_x = x;
      best_violation = viol;
      best_restart = r;
    }
  }
  if (!best_x)
    throw InfeasibleProblem("no feasible polyline found; increase the number of segments");

  const auto path = shape.trace(*best_x);
  const double h = path.h;
  const double scale = 1.0 / b.lambda;
  const int n = b.dim();
  Points pts(n, static_cast<Eigen::Index>(m + 1)), tan(n, static_cast<Eigen::Index>(m + 1));
  Vector pos = b.p;
  pts.col(0) = b.p;
  tan.col(0) = b.v;
  for (std::size_t k = 0; k < m; ++k) {
    pos += h * scale * path.u.col(static_cast<Eigen::Index>(k));
    pts.col(static_cast<Eigen::Index>(k + 1)) = pos;
    if (k + 1 < m) tan.col(static_cast<Eigen::Index>(k + 1)) =
          (path.u.col(static_cast<Eigen::Index>(k)) + path.u.col(static_cast<Eigen::Index>(k + 1))).normalized();
  }
  // The endpoint residual is below feasibility_tol; pin it exactly.
  pts.col(static_cast<Eigen::Index>(m)) = b.q;
  tan.col(static_cast<Eigen::Index>(m)) = opts.one_sided ? Vector(path.u.col(static_cast<Eigen::Index>(m - 1))) : b.w;

  OracleResult res;
  res.polyline = build_curve(std::move(pts), false, std::move(tan));
  res.length = best_len * scale;
  res.turning_budget = h;
  res.turning.push_back(unit_angle(b.v, path.u.col(0)));
  res.min_saturation = kInf;
  for (std::size_t k = 1; k < m; ++k) {
    const double turn =
        unit_angle(path.u.col(static_cast<Eigen::Index>(k - 1)), path.u.col(static_cast<Eigen::Index>(k)));
    res.turning.push_back(turn);
    res.min_saturation = std::min(res.min_saturation, turn / h);
    if (turn >= 0.95 * h) res.saturated_fraction += 1.0;
  }
  res.saturated_fraction /= static_cast<double>(m - 1);
  if (!opts.one_sided) res.turning.push_back(unit_angle(path.u.col(static_cast<Eigen::Index>(m - 1)), b.w));
  res.constraint_violation = best_violation;
  res.restart = best_restart;
  res.feasible_restarts = feasible;
  return res;
}

}  // namespace ropelength
