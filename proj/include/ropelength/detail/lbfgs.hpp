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

#include <cmath>
#include <deque>
#include <vector>

namespace ropelength::detail {

struct LbfgsOptions {
  int max_iterations = 1000;
  int history = 10;
  double gradient_tol = 1e-10;
  double min_step = 1e-20;
};

struct LbfgsResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes f over x in place. `fg(x, grad)` returns f(x) and writes the
/// gradient. Backtracking Armijo line search; curvature pairs with
/// non-positive s.y are skipped.
template <class Fg>
LbfgsResult lbfgs_minimize(Fg &&fg, Eigen::VectorXd &x, const LbfgsOptions &opts = {}) {
  using Eigen::VectorXd;
  LbfgsResult res;
  VectorXd g(x.size()), g_new(x.size());
  double f = fg(x, g);
  std::deque<VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it;
    if (g.lpNorm<Eigen::Infinity>() < opts.gradient_tol) {
      res.converged = true;
      break;
    }
    // Two-loop recursion.
    VectorXd d = -g;
    const std::size_t m = s_hist.size();
    std::vector<double> alpha(m);
    for (std::size_t k = m; k-- > 0;) {
      alpha[k] = rho_hist[k] * s_hist[k].dot(d);
      d -= alpha[k] * y_hist[k];
    }
    if (m > 0) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t k = 0; k < m; ++k) {
      const double beta = rho_hist[k] * y_hist[k].dot(d);
      d += (alpha[k] - beta) * s_hist[k];
    }
    double slope = g.dot(d);
    if (!(slope < 0)) {
      d = -g;
      slope = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }
    double step = 1.0;
    if (m == 0) step = std::min(1.0, 1.0 / std::max(1e-300, g.lpNorm<Eigen::Infinity>()));
    VectorXd x_new;
    double f_new = f;
    bool accepted = false;
    while (step > opts.min_step) {
      x_new = x + step * d;
      f_new = fg(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    VectorXd s = x_new - x;
    VectorXd y = g_new - g;
    const double sy = s.dot(y);
    x = std::move(x_new);
    g = g_new;
    const double f_old = f;
    f = f_new;
    if (sy > 1e-16 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opts.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    if (std::abs(f_old - f) <= 1e-16 * std::max(1.0, std::abs(f))) {
      res.converged = g.lpNorm<Eigen::Infinity>() < 1e3 * opts.gradient_tol;
      break;
    }
  }
  res.value = f;
  return res;
}

}  // namespace ropelength::detail
