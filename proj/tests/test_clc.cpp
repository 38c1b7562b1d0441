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

#include <algorithm>
#include <random>

#include "support.hpp"

namespace rl = ropelength;
using rl::testing::vec;

namespace {

std::vector<double> lengths(const std::vector<rl::ClcPath> &paths) {
  std::vector<double> out;
  for (const auto &p : paths) out.push_back(p.length());
  std::sort(out.begin(), out.end());
  return out;
}

void expect_meets_boundary(const rl::ClcPath &path, const rl::BoundaryData &b) {
  const double len = path.length();
  EXPECT_LT((path.position(0) - b.p).norm(), 1e-9);
  EXPECT_LT((path.tangent(0) - b.v).norm(), 1e-9);
  EXPECT_LT((path.position(len) - b.q).norm(), 1e-9);
  EXPECT_LT((path.tangent(len) - b.w).norm(), 1e-9);
  EXPECT_LT(path.joint_residual(), 1e-9);
  EXPECT_DOUBLE_EQ(path.first.radius, 1.0 / b.lambda);
  EXPECT_DOUBLE_EQ(path.second.radius, 1.0 / b.lambda);
}

}  // namespace

TEST(JCurve, HalfTurnOntoBoundaryCircle) {
  const rl::JCurve j = rl::shortest_to_target_in_complement(vec({0, 0}), vec({1, 0}), vec({0, 2}), 1.0);
  EXPECT_EQ(j.kind, rl::JCurve::Kind::arc);
  EXPECT_NEAR(j.length(), rl::kPi, 1e-12);
}

TEST(JCurve, StraightAhead) {
  const rl::JCurve j = rl::shortest_to_target_in_complement(vec({0, 0}), vec({1, 0}), vec({3.5, 0}), 1.0);
  EXPECT_EQ(j.kind, rl::JCurve::Kind::segment);
  EXPECT_NEAR(j.length(), 3.5, 1e-12);
}

TEST(JCurve, ArcThenTangentSegment) {
  const rl::JCurve j = rl::shortest_to_target_in_complement(vec({0, 0}), vec({1, 0}), vec({0, 3}), 1.0);
  EXPECT_EQ(j.kind, rl::JCurve::Kind::arc_then_segment);
  EXPECT_NEAR(j.length(), 2 * rl::kPi / 3 + std::sqrt(3.0), 1e-9);
  EXPECT_NEAR(j.arc_angle, 2 * rl::kPi / 3, 1e-12);
  EXPECT_NEAR(j.segment_length, std::sqrt(3.0), 1e-12);
  EXPECT_LT((j.joint() - vec({std::sqrt(3.0) / 2, 1.5})).norm(), 1e-12);
}

TEST(JCurve, StaysOutsideTheObstacle) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const rl::Vector v = vec({g(rng), g(rng), g(rng)}).normalized();
    const rl::Vector q = 3.0 * vec({g(rng), g(rng), g(rng)});
    const double lambda = 0.5 + std::abs(g(rng));
    const rl::ObstacleSpec o{vec({0, 0, 0}), v, 1.0 / lambda};
    if (rl::obstacle_contains(o, q)) continue;
    const rl::JCurve j = rl::shortest_to_target_in_complement(o.p, v, q, lambda);
    const rl::Curve c = j.sample(200);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LE(rl::obstacle_penetration(o, c.point(i)), 1e-9);
    EXPECT_LT((c.point(c.size() - 1) - q).norm(), 1e-9);
  }
}

TEST(JCurve, Errors) {
  EXPECT_THROW(rl::shortest_to_target_in_complement(vec({0, 0}), vec({1, 0}), vec({0, 1}), 1.0), rl::InvalidInput);
  EXPECT_THROW(rl::shortest_to_target_in_complement(vec({0, 0}), vec({1, 0}), vec({0, 0}), 1.0), rl::InvalidInput);
  const rl::JCurve back = rl::shortest_to_target_in_complement(vec({0, 0, 0}), vec({1, 0, 0}), vec({-2, 0, 0}), 1.0);
  EXPECT_TRUE(back.multiple_solutions);
}

TEST(JCurve, NoLongerThanTheOneSidedOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-4, 4);
  int checked = 0;
  while (checked < 8) {
    const rl::Vector q = vec({u(rng), u(rng)});
    if (rl::obstacle_contains({vec({0, 0}), vec({1, 0}), 1.0}, q) || q.norm() < 0.5) continue;
    const rl::JCurve j = rl::shortest_to_target_in_complement(vec({0, 0}), vec({1, 0}), q, 1.0);
    rl::OracleOptions o;
    o.segments = 64;
    o.restarts = 4;
    o.one_sided = true;
    o.seed = static_cast<std::uint64_t>(checked);
    const rl::OracleResult r = rl::discrete_shortest_oracle({vec({0, 0}), q, vec({1, 0}), j.tangent(j.length()), 1.0}, o);
    EXPECT_LE(j.length(), r.length * 1.01) << q.transpose();
    ++checked;
  }
}

TEST(Csc, StraightLineBoundary) {
  const rl::BoundaryData b{vec({0, 0}), vec({10, 0}), vec({1, 0}), vec({1, 0}), 1.0};
  const auto c = rl::csc_candidates(b);
  ASSERT_FALSE(c.empty());
  EXPECT_NEAR(c.front().length(), 10.0, 1e-12);
  EXPECT_NEAR(c.front().first.angle, 0.0, 1e-12);
  EXPECT_NEAR(c.front().second.angle, 0.0, 1e-12);
  for (const auto &p : c) expect_meets_boundary(p, b);
}

TEST(Csc, UTurnAgreesWithOracle) {
  const rl::BoundaryData b{vec({0, 0}), vec({0, 4}), vec({1, 0}), vec({-1, 0}), 1.0};
  const auto c = rl::csc_candidates(b);
  ASSERT_GE(c.size(), 2u);
  for (const auto &p : c) expect_meets_boundary(p, b);
  const rl::OracleResult r = rl::discrete_shortest_oracle(b);
  EXPECT_NEAR(c.front().length(), r.length, 0.01 * r.length);
}

TEST(Csc, CoincidentEndsWithReversedTangentIsConstantCurvature) {
  const rl::BoundaryData b{vec({0, 0}), vec({0, 0}), vec({1, 0}), vec({-1, 0}), 1.0};
  const rl::PlanResult res = rl::plan_shortest_path(b);
  EXPECT_EQ(res.regime, rl::PlanRegime::constant_curvature);
  ASSERT_TRUE(res.oracle.has_value());
  EXPECT_NEAR(res.oracle->length, 7 * rl::kPi / 3, 0.01 * 7 * rl::kPi / 3);
}

TEST(Csc, SpatialCandidatesMeetBoundary) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    const rl::BoundaryData b{vec({0, 0, 0}), 5.0 * vec({g(rng), g(rng), g(rng)}).normalized(),
                             vec({g(rng), g(rng), g(rng)}).normalized(), vec({g(rng), g(rng), g(rng)}).normalized(),
                             1.0};
    const auto c = rl::csc_candidates(b);
    ASSERT_FALSE(c.empty()) << trial;
    for (const auto &p : c) expect_meets_boundary(p, b);
    for (std::size_t k = 1; k < c.size(); ++k) EXPECT_LE(c[k - 1].length(), c[k].length());
  }
}

TEST(Csc, PlanarDataInSpaceMatchesPlanarSolve) {
  const rl::BoundaryData flat{vec({0, 0}), vec({3, 4}), vec({0, 1}), vec({1, 0}), 1.0};
  const rl::BoundaryData lifted{vec({0, 0, 0}), vec({3, 4, 0}), vec({0, 1, 0}), vec({1, 0, 0}), 1.0};
  EXPECT_NEAR(rl::csc_candidates(lifted).front().length(), rl::csc_candidates(flat).front().length(), 1e-9);
}

TEST(Csc, DilationEquivariance) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const rl::BoundaryData b = rl::testing::random_planar_boundary(rng, 0.5, 6.0);
    const double lam = 0.3 + 3.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    const rl::BoundaryData s{lam * b.p, lam * b.q, b.v, b.w, b.lambda / lam};
    const auto a = lengths(rl::csc_candidates(b)), c = lengths(rl::csc_candidates(s));
    ASSERT_EQ(a.size(), c.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(c[k], lam * a[k], 1e-9 * c[k]);
  }
}

TEST(Csc, ReversalSymmetry) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const rl::BoundaryData b = rl::testing::random_planar_boundary(rng, 0.5, 6.0);
    const auto a = lengths(rl::csc_candidates(b)), r = lengths(rl::csc_candidates(b.reversed()));
    ASSERT_EQ(a.size(), r.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], r[k], 1e-9 * std::max(1.0, a[k]));
  }
}

TEST(Csc, LongArcCandidatePassesStructureCheck) {
  // Left arc of 1.2 pi, segment 3, left arc of 1.1 pi.
  rl::fixtures::Turtle t;
  t.turn(1.0, 1.2 * rl::kPi).forward(3.0).turn(1.0, 1.1 * rl::kPi);
  const rl::Curve traced = t.sample(2, false);
  const rl::BoundaryData b{traced.point(0), traced.point(1), traced.tangent(0), traced.tangent(1), 1.0};
  const auto c = rl::csc_candidates(b);
  const auto it = std::find_if(c.begin(), c.end(), [](const rl::ClcPath &p) {
    return p.first.angle >= rl::kPi && p.second.angle >= rl::kPi;
  });
  ASSERT_NE(it, c.end());
  EXPECT_NEAR(it->length(), t.length(), 1e-9);
  const rl::Theorem1Verdict v = rl::verify_theorem1_structure(it->sample(2000), 1.0, 0.05);
  EXPECT_TRUE(v.passed());
}

TEST(Oracle, StraightLine) {
  const rl::OracleResult r = rl::discrete_shortest_oracle({vec({0, 0}), vec({10, 0}), vec({1, 0}), vec({1, 0}), 1.0});
  EXPECT_NEAR(r.length, 10.0, 1e-3);
  EXPECT_LE(r.constraint_violation, 1e-8);
}

TEST(Oracle, OneSidedMatchesClosedForm) {
  rl::OracleOptions o;
  o.one_sided = true;
  const rl::OracleResult r = rl::discrete_shortest_oracle({vec({0, 0}), vec({0, 3}), vec({1, 0}), vec({0, 1}), 1.0}, o);
  const double exact = 2 * rl::kPi / 3 + std::sqrt(3.0);
  EXPECT_NEAR(r.length, exact, 0.01 * exact);
}

TEST(Oracle, CoincidentEndsSaturateTheTurningBudget) {
  const rl::OracleResult r = rl::discrete_shortest_oracle({vec({0, 0}), vec({0, 0}), vec({1, 0}), vec({-1, 0}), 1.0});
  // Every joint except the inflections turns by at least 95% of its budget.
  EXPECT_GE(r.saturated_fraction, 0.95);
  const rl::CurvatureProfile k = rl::curvature_profile(r.polyline);
  EXPECT_NEAR(k.sup_kappa, 1.0, 0.05);
}

TEST(Oracle, DeterministicForSeed) {
  const rl::BoundaryData b{vec({0, 0}), vec({1, 5}), vec({0, 1}), vec({-1, 0}), 1.0};
  rl::OracleOptions o;
  o.seed = 9;
  o.segments = 64;
  const rl::OracleResult a = rl::discrete_shortest_oracle(b, o), c = rl::discrete_shortest_oracle(b, o);
  EXPECT_EQ(a.length, c.length);
  EXPECT_EQ(a.polyline.points(), c.polyline.points());
}

TEST(Oracle, RejectsTooFewSegments) {
  rl::OracleOptions o;
  o.segments = 8;
  EXPECT_THROW(rl::discrete_shortest_oracle({vec({0, 0}), vec({3, 0}), vec({1, 0}), vec({1, 0}), 1.0}, o),
               rl::InvalidInput);
}

TEST(Theorem1, ShortInteriorArcFails) {
  rl::fixtures::Turtle t;
  t.forward(2.0).turn(1.0, 0.5 * rl::kPi).forward(2.0);
  const rl::Theorem1Verdict v = rl::verify_theorem1_structure(t.sample(2000, false), 1.0, 0.05);
  EXPECT_FALSE(v.passed());
  const auto arc = std::find_if(v.runs.begin(), v.runs.end(), [](const rl::Theorem1Run &r) { return r.maximal; });
  ASSERT_NE(arc, v.runs.end());
  EXPECT_FALSE(arc->passed);
  EXPECT_NEAR(arc->arc_length, 0.5 * rl::kPi, 0.05);
}

TEST(Theorem1, CurvedSubmaximalRunFails) {
  rl::fixtures::Turtle t;
  t.forward(1.0).turn(2.0, 1.0).forward(1.0);
  EXPECT_FALSE(rl::verify_theorem1_structure(t.sample(1000, false), 1.0, 0.05).passed());
}

TEST(Containment, HalfCircleIsBoundaryContact) {
  rl::fixtures::Turtle t;
  t.turn(1.0, rl::kPi);
  const rl::Curve c = t.sample(400, false);
  const rl::ContainmentReport r = rl::verify_prop2_containment(c, 1.0);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.full_contact_samples.size(), c.size());
}

TEST(Containment, SegmentHasNoContacts) {
  rl::fixtures::Turtle t;
  t.forward(5.0);
  const rl::ContainmentReport r = rl::verify_prop2_containment(t.sample(100, false), 1.0);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.contacts, 0u);
}

TEST(Containment, CurvaturePreconditionEnforced) {
  EXPECT_THROW(rl::verify_prop2_containment(rl::fixtures::circle(0.5, 200), 1.0), rl::InvalidInput);
}

TEST(Containment, OffsetCircleExcursionExceedsPi) {
  const rl::Curve arc = rl::fixtures::example1_offset_circle(0.05, 2000);
  const rl::ExcursionProbe p = rl::excursion_probe(arc, vec({0, 0}), 1.0);
  EXPECT_TRUE(p.endpoints_on_sphere);
  EXPECT_TRUE(p.exits_ball);
  EXPECT_GT(p.length, rl::kPi);
  EXPECT_NEAR(p.length, rl::fixtures::example1_exterior_length(0.05), 1e-5);
  EXPECT_TRUE(p.passed);
}

TEST(Planner, StraightDataGivesSegment) {
  const rl::PlanResult r = rl::plan_shortest_path({vec({0, 0}), vec({10, 0}), vec({1, 0}), vec({1, 0}), 1.0});
  EXPECT_EQ(r.regime, rl::PlanRegime::clc);
  EXPECT_NEAR(r.best_length(), 10.0, 1e-12);
}

TEST(Planner, MutuallyInsideObstaclesRoutesToOracle) {
  // q = (0, 0.5) lies in O_p(e1) and p lies in O_q(-e1).
  const rl::PlanResult r = rl::plan_shortest_path({vec({0, 0}), vec({0, 0.5}), vec({1, 0}), vec({-1, 0}), 1.0});
  EXPECT_TRUE(r.infeasible_for_clc_check);
  EXPECT_EQ(r.regime, rl::PlanRegime::oracle_only);
  EXPECT_TRUE(r.oracle.has_value());
}
