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

#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace rl = ropelength;
using rl::testing::vec;

namespace {

// Smooth normal perturbation: four low-frequency modes of total amplitude `amp`.
rl::Curve smooth_noise(const rl::Curve &c, double amp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0, 2 * rl::kPi);
  double ph[4];
  for (double &x : ph) x = phase(rng);
  rl::Points pts = c.points();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double s = 2 * rl::kPi * c.arclength(i) / c.length();
    double a = 0;
    for (int k = 0; k < 4; ++k) a += std::cos((k + 2) * s + ph[k]);
    const rl::Vector nrm = vec({c.tangent(i)(1), -c.tangent(i)(0)});
    pts.col(static_cast<Eigen::Index>(i)) += 0.25 * amp * a * nrm;
  }
  return rl::build_curve(std::move(pts), true);
}

std::vector<rl::RunKind> kinds(const rl::StructureReport &r) {
  std::vector<rl::RunKind> out;
  for (const auto &run : r.runs) out.push_back(run.kind);
  return out;
}

// Run kinds up to a cyclic shift, with run sizes matching within `slack` samples.
bool same_structure(const rl::StructureReport &a, const rl::StructureReport &b, std::size_t slack) {
  const std::size_t n = a.runs.size();
  if (n != b.runs.size()) return false;
  for (std::size_t shift = 0; shift < n; ++shift) {
    bool ok = true;
    for (std::size_t k = 0; k < n && ok; ++k) {
      const auto &x = a.runs[k], &y = b.runs[(k + shift) % n];
      ok = x.kind == y.kind && (x.run.count > y.run.count ? x.run.count - y.run.count : y.run.count - x.run.count) <= slack;
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST(Classify, CircleIsMaximalAndCritical) {
  const rl::Curve c = rl::fixtures::circle(1.0, 1024);
  const rl::PointClasses pc = rl::classify_points(c, rl::thickness_report(c), rl::default_structure_tol(c));
  EXPECT_EQ(pc.count(rl::CurvatureClass::maximal), c.size());
  EXPECT_EQ(pc.critical_count(), c.size());
}

TEST(Classify, StadiumSegmentsAndArcs) {
  const rl::Curve c = rl::fixtures::stadium(1.0, 4.0, 1024);
  const rl::ThicknessReport t = rl::thickness_report(c);
  const rl::PointClasses pc = rl::classify_points(c, t, rl::default_structure_tol(c));
  const double margin = 2.0 * t.curvature.window;
  const double perim = c.length();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double s = c.arclength(i);
    // Lower straight [0, 4], arc [4, 4 + pi], upper straight, arc.
    const double local = std::fmod(s, 4.0 + rl::kPi);
    if (local > margin && local < 4.0 - margin) {
      EXPECT_EQ(pc.kappa_class[i], rl::CurvatureClass::zero) << i;
      EXPECT_TRUE(pc.critical[i]) << i;
    } else if (local > 4.0 + margin && local < 4.0 + rl::kPi - margin && s < perim) {
      EXPECT_EQ(pc.kappa_class[i], rl::CurvatureClass::maximal) << i;
    }
  }
}

TEST(Classify, EllipseHasIntermediateCurvature) {
  const rl::Curve c = rl::fixtures::ellipse(2.0, 1.0, 1024);
  const rl::PointClasses pc = rl::classify_points(c, rl::thickness_report(c), rl::default_structure_tol(c));
  EXPECT_GT(pc.count(rl::CurvatureClass::between), 0u);
}

TEST(Classify, LabelsPartitionSamples) {
  for (const rl::Curve &c : {rl::fixtures::ellipse(2.0, 1.0, 512), rl::fixtures::rounded_square(1.0, 4.0, 512),
                             rl::fixtures::torus_knot(2, 3, 2.0, 0.8, 512)}) {
    const rl::PointClasses pc = rl::classify_points(c, rl::thickness_report(c), rl::default_structure_tol(c));
    ASSERT_EQ(pc.kappa_class.size(), c.size());
    EXPECT_EQ(pc.count(rl::CurvatureClass::zero) + pc.count(rl::CurvatureClass::maximal) +
                  pc.count(rl::CurvatureClass::between),
              c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (pc.critical[i]) {
        EXPECT_TRUE(pc.partner[i].has_value());
      }
    }
  }
}

TEST(CircleFit, RecoversSpatialArc) {
  const rl::Vector center = vec({1, -2, 0.5});
  const rl::Vector e1 = vec({1, 1, 0}).normalized(), e2 = vec({-1, 1, 2}).normalized();
  Eigen::MatrixXd pts(3, 50);
  for (int k = 0; k < 50; ++k) {
    const double a = 0.03 * k;
    pts.col(k) = center + 1.7 * (std::cos(a) * e1 + std::sin(a) * e2);
  }
  const rl::CircleFit f = rl::fit_circle(pts);
  EXPECT_NEAR(f.radius, 1.7, 1e-9);
  EXPECT_LT((f.center - center).norm(), 1e-9);
  EXPECT_LT(f.planarity, 1e-12);
  EXPECT_LT(f.radial_deviation, 1e-9);
}

TEST(Decompose, Stadium) {
  const rl::Curve c = rl::fixtures::stadium(1.0, 4.0, 2048);
  const rl::StructureReport r = rl::decompose_structure(c, rl::default_structure_tol(c));
  ASSERT_EQ(r.runs.size(), 4u);
  EXPECT_EQ(r.count(rl::RunKind::segment), 2u);
  EXPECT_EQ(r.count(rl::RunKind::arc), 2u);
  for (const auto &run : r.runs) {
    EXPECT_TRUE(run.valid);
    if (run.kind != rl::RunKind::arc) continue;
    ASSERT_TRUE(run.circle.has_value());
    EXPECT_NEAR(run.circle->radius, 1.0, 1e-2);
    EXPECT_LT(run.circle->planarity, 1e-9);
    EXPECT_NEAR(run.arc_length, rl::kPi, 2e-2);
  }
}

TEST(Decompose, CircleIsOneArc) {
  const rl::Curve c = rl::fixtures::circle(1.0, 1024);
  const rl::StructureReport r = rl::decompose_structure(c, rl::default_structure_tol(c));
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_EQ(r.runs[0].kind, rl::RunKind::arc);
  EXPECT_EQ(r.runs[0].run.count, c.size());
}

TEST(Decompose, StableUnderSmoothNoise) {
  for (const rl::Curve &c : {rl::fixtures::circle(1.0, 1024), rl::fixtures::stadium(1.0, 4.0, 1024)}) {
    const rl::StructureReport a = rl::decompose_structure(c, 0.05);
    const rl::StructureReport b = rl::decompose_structure(smooth_noise(c, 1e-3, 4), 0.05);
    EXPECT_TRUE(same_structure(a, b, 10));
    for (const auto &run : b.runs) EXPECT_TRUE(run.valid);
  }
}

TEST(Decompose, Idempotent) {
  for (const rl::Curve &c : {rl::fixtures::stadium(1.0, 4.0, 1024), rl::fixtures::circle(2.0, 512),
                             rl::fixtures::rounded_square(1.0, 2.0, 1024)}) {
    const double tol = rl::default_structure_tol(c);
    const rl::StructureReport a = rl::decompose_structure(c, tol);
    const rl::Curve again = rl::reconstruct(c, a);
    const rl::StructureReport b = rl::decompose_structure(again, tol);
    EXPECT_EQ(kinds(a), kinds(b));
    EXPECT_TRUE(same_structure(a, b, 2));
  }
}

TEST(Theorem2, StadiumPasses) {
  const rl::Curve c = rl::fixtures::stadium(1.0, 4.0, 1024);
  const rl::Theorem2Verdict v = rl::check_theorem2(c, rl::default_structure_tol(c));
  EXPECT_TRUE(v.hypothesis);
  EXPECT_TRUE(v.passed) << v.summary;
  EXPECT_LE(v.thickness_gap, 0.02);
}

TEST(Theorem2, CircleIsVacuous) {
  const rl::Curve c = rl::fixtures::circle(1.0, 1024);
  const rl::Theorem2Verdict v = rl::check_theorem2(c, rl::default_structure_tol(c));
  EXPECT_FALSE(v.hypothesis);
  EXPECT_TRUE(v.passed);
}

TEST(Theorem2, RoundedSquareVerdictIsSelfConsistent) {
  // Measured: mdc = 6 between opposite sides while r_o = 1, so the thickness
  // clause fails.
  const rl::Curve c = rl::fixtures::rounded_square(1.0, 4.0, 1024);
  const rl::ThicknessReport t = rl::thickness_report(c);
  const rl::Theorem2Verdict v = rl::check_theorem2(c, t, rl::default_structure_tol(c));
  EXPECT_NEAR(t.mdc, 6.0, 1e-2);
  EXPECT_NEAR(v.thickness_gap, std::abs(t.r_o - 0.5 * t.mdc) / t.r_o, 1e-12);
  EXPECT_FALSE(v.thickness_ok);
  EXPECT_FALSE(v.passed);
}

TEST(Theorem3, NotTriggeredOnCircleAndStadium) {
  for (const rl::Curve &c : {rl::fixtures::circle(1.0, 1024), rl::fixtures::stadium(1.0, 4.0, 1024)}) {
    const rl::Theorem3Verdict v = rl::check_theorem3(c, rl::default_structure_tol(c));
    EXPECT_FALSE(v.triggered);
    EXPECT_TRUE(v.passed);
  }
}

TEST(Theorem3, FlagsThickNonconstantCurves) {
  for (const rl::Curve &c : {rl::fixtures::rounded_square(1.0, 4.0, 1024), rl::fixtures::ellipse(2.0, 1.0, 1024)}) {
    const rl::Theorem3Verdict v = rl::check_theorem3(c, rl::default_structure_tol(c));
    EXPECT_TRUE(v.triggered);
    EXPECT_FALSE(v.passed);
  }
}

TEST(Verdicts, MonotoneInTolerance) {
  const std::vector<double> tols{1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0};
  for (const rl::Curve &c : {rl::fixtures::stadium(1.0, 4.0, 512), rl::fixtures::ellipse(2.0, 1.0, 512),
                             rl::fixtures::rounded_square(1.0, 4.0, 512), rl::fixtures::bumped_circle(0.05, 0.8, 512)}) {
    const rl::ThicknessReport t = rl::thickness_report(c);
    bool passed2 = false, passed3 = false;
    for (double tol : tols) {
      const bool p2 = rl::check_theorem2(c, t, tol).passed, p3 = rl::check_theorem3(t, tol).passed;
      EXPECT_TRUE(!passed2 || p2) << tol;
      EXPECT_TRUE(!passed3 || p3) << tol;
      passed2 = p2;
      passed3 = p3;
    }
  }
}

TEST(Verdicts, RigidMotionInvariant) {
  std::mt19937_64 rng(8);
  for (const rl::Curve &c : {rl::fixtures::stadium(1.0, 4.0, 512), rl::fixtures::ellipse(2.0, 1.0, 512)}) {
    const double tol = rl::default_structure_tol(c);
    const rl::Theorem2Verdict a2 = rl::check_theorem2(c, tol);
    const rl::Theorem3Verdict a3 = rl::check_theorem3(c, tol);
    const auto ka = kinds(rl::decompose_structure(c, tol));
    for (int k = 0; k < 3; ++k) {
      const rl::Curve m = rl::testing::Similarity::random(2, rng).apply(c);
      EXPECT_EQ(rl::check_theorem2(m, tol).passed, a2.passed);
      EXPECT_EQ(rl::check_theorem3(m, tol).passed, a3.passed);
      EXPECT_EQ(kinds(rl::decompose_structure(m, tol)), ka);
    }
  }
}

TEST(Relax, CircleIsLocallyMinimal) {
  const rl::RelaxResult r = rl::relax_ropelength(rl::fixtures::circle(1.0, 256), 1.5, 300, 1);
  EXPECT_GE(r.trace.back().ropelength, r.trace.front().ropelength * (1.0 - 1e-3));
}

TEST(Relax, StadiumWithThicknessFloorIsMonotone) {
  rl::RelaxOptions o;
  o.min_r_o = 1.0 - 1e-2;
  const rl::RelaxResult r = rl::relax_ropelength(rl::fixtures::stadium(1.0, 4.0, 512), 1.0 + 1e-2, 300, 2, o);
  ASSERT_EQ(r.trace.size(), 301u);
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    EXPECT_LE(r.trace[k].ropelength, r.trace[k - 1].ropelength);
    EXPECT_GE(r.trace[k].r_o, *o.min_r_o);
  }
}

TEST(Relax, DeterministicAndValidated) {
  const rl::Curve c = rl::fixtures::bumped_circle(0.03, 0.8, 256);
  const rl::RelaxResult a = rl::relax_ropelength(c, 1.5, 100, 42), b = rl::relax_ropelength(c, 1.5, 100, 42);
  EXPECT_EQ(a.accepted, b.accepted);
  EXPECT_EQ(a.curve.points(), b.curve.points());
  EXPECT_THROW(rl::relax_ropelength(c, 0.5, 10, 0), rl::InvalidInput);
  EXPECT_THROW(rl::relax_ropelength(rl::fixtures::example1_offset_circle(0.1, 50), 1.5, 10, 0), rl::InvalidInput);
}
