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
#include <vector>

#include "ropelength/curve.hpp"
#include "ropelength/thickness.hpp"

namespace ropelength {

struct RelaxOptions {
  /// Working resolution; the input is resampled to this many samples.
  std::size_t samples = 256;
  /// Accepted relative decrease of r_o per move.
  double r_o_tol = 1e-9;
  /// Optional hard floor on r_o.
  std::optional<double> min_r_o;
  /// Bump half-width range, in samples.
  std::size_t min_width = 4;
  std::size_t max_width = 128;
};

struct RelaxStep {
  std::size_t step = 0;
  double length = 0.0;
  double r_o = 0.0;
  double ropelength = 0.0;
  bool accepted = false;
};

struct RelaxResult {
  Curve curve;
  std::vector<RelaxStep> trace;  // entry 0 is the starting state
  std::size_t accepted = 0;
};

namespace detail {

// (1 - x^2)^3 on |x| < 1: C^2 with compact support.
inline double bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  const double b = 1.0 - x * x;
  return b * b * b;
}

struct RelaxState {
  Curve curve;
  double r_o = kInf;
  std::size_t bottleneck = 0;  // sample whose tangent ball attains r_o
  double sup_kappa = 0.0;
  double ropelength() const { return curve.length() / r_o; }
};

inline RelaxState relax_state(Curve c) {
  RelaxState s{std::move(c)};
  const BallRadius ball = rolling_ball_radius(s.curve);
  s.r_o = ball.value;
  if (ball.witness) s.bottleneck = ball.witness->first;
  s.sup_kappa = curvature_profile(s.curve).sup_kappa;
  return s;
}

// Resample with tangents re-estimated from the new points.
inline Curve relax_resample(const Curve &c, std::size_t m) {
  const Curve r = resample_arclength(c, m);
  return build_curve(r.points(), true);
}

}  // namespace detail

/// Randomized local search on ropelength under a curvature cap. Each move
/// displaces a window of samples along the discrete curvature vector scaled by
/// a smooth bump and a signed step. The candidate is resampled, dilated back
/// to the current r_o if it got thinner, and accepted iff sup kappa <= cap,
/// r_o does not drop by more than r_o_tol (relative), and ropelength strictly
/// decreases. The trace is therefore non-increasing.
inline RelaxResult relax_ropelength(const Curve &input, double lambda_cap, std::size_t steps, std::uint64_t seed,
                                    const RelaxOptions &opts = {}) {
  if (!input.closed()) throw InvalidInput("relaxation requires a closed curve");
  if (opts.samples < 16) throw InvalidInput("relaxation needs at least 16 samples");
  detail::RelaxState cur = detail::relax_state(detail::relax_resample(input, opts.samples));
  if (cur.sup_kappa > lambda_cap) throw InvalidInput("curvature cap is below the current curvature");
  if (!std::isfinite(cur.r_o)) throw InvalidInput("relaxation needs a curve with finite ball radius");

  RelaxResult res;
  res.trace.push_back({0, cur.curve.length(), cur.r_o, cur.ropelength(), true});
  std::mt19937_64 rng(seed);
  const std::size_t n = opts.samples;
  const std::size_t max_w = std::clamp<std::size_t>(opts.max_width, opts.min_width, n / 2);
  std::uniform_int_distribution<std::size_t> pick_center(0, n - 1);
  std::uniform_int_distribution<std::size_t> pick_width(opts.min_width, max_w);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Step scale in units of length^2 (it multiplies a curvature vector).
  double eps = 0.05 * cur.r_o * cur.r_o;
  const double eps_min = 1e-8 * cur.r_o * cur.r_o, eps_max = 0.5 * cur.r_o * cur.r_o;

  for (std::size_t step = 1; step <= steps; ++step) {
    // Half of the moves target the sample that limits r_o.
    const std::size_t width = pick_width(rng);
    std::size_t center = pick_center(rng);
    if (unit(rng) < 0.5) center = cur.bottleneck;
    const double sign = unit(rng) < 0.8 ? 1.0 : -1.0;
    const double amp = sign * eps * (0.25 + 0.75 * unit(rng));

    const Curve &c = cur.curve;
    Points pts = c.points();
    for (std::ptrdiff_t o = -static_cast<std::ptrdiff_t>(width); o <= static_cast<std::ptrdiff_t>(width); ++o) {
      const std::size_t i = c.wrap(static_cast<std::ptrdiff_t>(center) + o);
      const double b = detail::bump(static_cast<double>(o) / static_cast<double>(width + 1));
      if (b == 0.0) continue;
      const std::size_t prev = c.wrap(static_cast<std::ptrdiff_t>(i) - 1), next = c.wrap(static_cast<std::ptrdiff_t>(i) + 1);
      const Vector e_in = (c.point(i) - c.point(prev)) / c.segment_length(prev);
      const Vector e_out = (c.point(next) - c.point(i)) / c.segment_length(i);
      const double h = 0.5 * (c.segment_length(prev) + c.segment_length(i));
      // Discrete curvature vector: the negative length gradient per unit length.
      pts.col(static_cast<Eigen::Index>(i)) += amp * b * (e_out - e_in) / h;
    }

    bool accepted = false;
    try {
      detail::RelaxState cand = detail::relax_state(detail::relax_resample(build_curve(std::move(pts), true), n));
      // Ropelength is scale invariant: dilate a candidate that lost thickness
      // back to the current r_o so that only its shape is judged.
      if (cand.r_o < cur.r_o) {
        const double f = cur.r_o / cand.r_o;
        const Vector centroid = cand.curve.points().rowwise().mean();
        Points scaled = ((cand.curve.points().colwise() - centroid) * f).colwise() + centroid;
        cand = detail::relax_state(build_curve(std::move(scaled), true, cand.curve.tangents()));
      }
      accepted = cand.sup_kappa <= lambda_cap && cand.r_o >= cur.r_o * (1.0 - opts.r_o_tol) &&
                 (!opts.min_r_o || cand.r_o >= *opts.min_r_o) && cand.ropelength() < cur.ropelength();
      if (accepted) cur = std::move(cand);
    } catch (const InvalidInput &) {
      accepted = false;  // the move collapsed a segment
    }
    eps = std::clamp(accepted ? eps * 1.3 : eps * 0.93, eps_min, eps_max);
    if (accepted) ++res.accepted;
    res.trace.push_back({step, cur.curve.length(), cur.r_o, cur.ropelength(), accepted});
  }
  res.curve = cur.curve;
  return res;
}

}  // namespace ropelength
