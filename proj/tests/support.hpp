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
#include <random>

#include <Eigen/Dense>

#include "ropelength/ropelength.hpp"

namespace ropelength::testing {

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v(k++) = x;
  return v;
}

/// x -> scale * R x + shift with R a random rotation (possibly improper).
struct Similarity {
  Eigen::MatrixXd rotation;
  Vector shift;
  double scale = 1.0;

  static Similarity random(int dim, std::mt19937_64 &rng, double min_scale = 0.25, double max_scale = 4.0) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) a(i, j) = g(rng);
    Similarity s;
    s.rotation = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() * Eigen::MatrixXd::Identity(dim, dim);
    s.shift = Vector(dim);
    for (int i = 0; i < dim; ++i) s.shift(i) = 10.0 * g(rng);
    std::uniform_real_distribution<double> u(std::log(min_scale), std::log(max_scale));
    s.scale = std::exp(u(rng));
    return s;
  }

  Curve apply(const Curve &c) const {
    Points pts = (scale * rotation * c.points()).colwise() + shift;
    Points tan = rotation * c.tangents();
    return build_curve(std::move(pts), c.closed(), std::move(tan));
  }
};

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

/// Random planar boundary data with |q - p| in [min_dist, max_dist] / lambda.
inline BoundaryData random_planar_boundary(std::mt19937_64 &rng, double min_dist = 4.0, double max_dist = 8.0,
                                           double lambda = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double ang = 2 * kPi * u(rng), d = (min_dist + (max_dist - min_dist) * u(rng)) / lambda;
  const double a = 2 * kPi * u(rng), c = 2 * kPi * u(rng);
  return {vec({0, 0}), vec({d * std::cos(ang), d * std::sin(ang)}), vec({std::cos(a), std::sin(a)}),
          vec({std::cos(c), std::sin(c)}), lambda};
}

/// inf{r : some sample lies in the obstacle of another sample at radius r},
/// by bracketing and bisection on obstacle_contains. Independent of the
/// closed-form pair radius used by rolling_ball_radius.
inline double bisection_ball_radius(const Curve &c, double rel_tol = 1e-14) {
  const std::size_t n = c.size();
  auto hit = [&](double r) {
    for (std::size_t i = 0; i < n; ++i) {
      const ObstacleSpec spec{c.point(i), c.tangent(i), r};
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && obstacle_contains(spec, c.point(j))) return true;
    }
    return false;
  };
  double hi = c.length();
  while (!hit(hi)) {
    hi *= 2.0;
    if (hi > 1e12 * c.length()) return kInf;
  }
  double lo = 0.0;
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (hit(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace ropelength::testing
