// Copyright 2026 The Fabrics Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fabrics/geometry.h"

#include <cmath>

#include <gtest/gtest.h>

#include "fabrics/errors.h"
#include "fabrics/random.h"
#include "oracle.h"

namespace fabrics {
namespace {

TEST(GeometryTest, GeometricTermsAreHd2) {
  Sampler s(40);
  for (const auto& entry : oracle::TermCatalog(PolicyKind::kGeometricHd2)) {
    if (entry.term->role() != TermRole::kGeometric) continue;
    for (int i = 0; i < 100; ++i) {
      const Vec x = entry.sample_x(s);
      const Vec xd = s.UniformVec(entry.term->dim(), -2.0, 2.0);
      const double err = oracle::Hd2Error(
          [&](const Vec& p, const Vec& v) { return entry.term->Policy(p, v); }, x, xd,
          oracle::Hd2Scales());
      EXPECT_LT(err, 1e-9) << entry.label;
    }
  }
}

TEST(GeometryTest, ForcingPotentialGradientsMatchOracle) {
  Sampler s(41);
  for (const auto& entry : oracle::TermCatalog(PolicyKind::kForcingPotential)) {
    ASSERT_EQ(entry.term->role(), TermRole::kForcing) << entry.label;
    ASSERT_TRUE(entry.term->has_potential()) << entry.label;
    for (int i = 0; i < 30; ++i) {
      const Vec x = entry.sample_x(s);
      const Vec fd =
          oracle::FdGradient([&](const Vec& p) { return entry.term->Potential(p); }, x);
      EXPECT_LT(oracle::RelError(entry.term->PotentialGradient(x), fd), 1e-6) << entry.label;
    }
  }
}

TEST(GeometryTest, ForcingGradientIsMetricTimesAccelGradient) {
  // grad Psi = G grad psi_1 for every forcing term.
  Sampler s(42);
  for (const auto& entry : oracle::TermCatalog(PolicyKind::kForcingPotential)) {
    for (int i = 0; i < 20; ++i) {
      const Vec x = entry.sample_x(s);
      // The metric at a velocity that turns every gate on.
      const Vec xd = -Vec::Ones(entry.term->dim());
      const Mat g = entry.term->energy()->Evaluate(x, xd).tensor;
      const Vec expected = g * entry.term->AccelPotentialGradient(x);
      EXPECT_LT(oracle::RelError(entry.term->PotentialGradient(x), expected), 1e-9)
          << entry.label;
      EXPECT_LT(oracle::RelError(entry.term->Policy(x, xd),
                                 Vec(-entry.term->AccelPotentialGradient(x))),
                1e-12)
          << entry.label;
    }
  }
}

TEST(GeometryTest, LiftHd2ScalesWithSpeedSquared) {
  Vec pi(2), v(2);
  pi << 1.0, -2.0;
  v << 3.0, 4.0;
  EXPECT_TRUE(LiftHd2(pi, v).isApprox(25.0 * pi));
}

TEST(GeometryTest, GatedBarrierPolicyIsOffMovingAway) {
  ObstacleParams o;
  o.origin = Vec::Zero(2);
  const TermPtr t = ObstacleTerm(o, PolicyKind::kGeometricHd2);
  EXPECT_TRUE(t->Policy(Vec::Constant(1, 0.5), Vec::Constant(1, 1.0)).isZero());
  EXPECT_GT(t->Policy(Vec::Constant(1, 0.5), Vec::Constant(1, -1.0))[0], 0.0);
}

TEST(GeometryTest, AttractorPriorityRisesNearTarget) {
  AttractorParams a;
  a.target = Vec::Zero(2);
  const Vec near = Vec::Constant(2, 0.01);
  const Vec far = Vec::Constant(2, 5.0);
  EXPECT_NEAR(AttractorMetricField(a, near).metric(0, 0), a.mbar, 1e-3);
  EXPECT_NEAR(AttractorMetricField(a, far).metric(0, 0), a.munder, 1e-6);
  a.metric = AttractorMetric::kTanhSwitch;
  a.alpha_m = 50.0;
  EXPECT_GT(AttractorMetricField(a, near).metric(0, 0),
            AttractorMetricField(a, far).metric(0, 0));
  a.switch_sign = 1.0;
  EXPECT_LT(AttractorMetricField(a, near).metric(0, 0),
            AttractorMetricField(a, far).metric(0, 0));
}

TEST(GeometryTest, InvalidParametersRejected) {
  AttractorParams a;
  a.target = Vec::Zero(2);
  a.munder = 3.0;
  EXPECT_THROW(AttractorTerm(a, PolicyKind::kForcingPotential), InvalidValueError);
  JointLimitParams j;
  j.lower = {1.0};
  j.upper = {0.0};
  EXPECT_THROW(JointLimitTerms(j, PolicyKind::kGeometricHd2), InvalidValueError);
  EXPECT_THROW(ExecutionEnergyTerm(2, 0.0), InvalidValueError);
}

TEST(GeometryTest, JointLimitTermsComeInPairs) {
  JointLimitParams j;
  j.lower = {-1.0, -1.0, -1.0};
  j.upper = {1.0, 1.0, 1.0};
  EXPECT_EQ(JointLimitTerms(j, PolicyKind::kGeometricHd2).size(), 6u);
}

class CubbyTest : public ::testing::Test {
 protected:
  CubbyTest() {
    scene_.opening_center = Eigen::Vector2d(1.0, 0.0);
    scene_.outward_normal = Eigen::Vector2d(-1.0, 0.0);
    scene_.width = 0.4;
    scene_.depth = 0.4;
    scene_.target = Eigen::Vector2d(1.2, 0.0);
  }
  CubbyScene scene_;
  CubbyParams params_;
};

TEST_F(CubbyTest, WallsOutlineTheBox) {
  const auto walls = scene_.Walls();
  ASSERT_EQ(walls.size(), 3u);
  EXPECT_NEAR(walls[1].a[0], 1.4, 1e-12);
  EXPECT_NEAR(walls[1].b[0], 1.4, 1e-12);
  EXPECT_NEAR(scene_.Waypoint(0.15).x(), 0.85, 1e-12);
}

TEST_F(CubbyTest, ExtractionVanishesInFrontOfTheOpening) {
  EXPECT_EQ(ExtractionPriority(scene_, params_, Eigen::Vector2d(0.5, 0.0)), 0.0);
  const double on_axis = ExtractionPriority(scene_, params_, Eigen::Vector2d(1.2, 0.0));
  const double off_axis = ExtractionPriority(scene_, params_, Eigen::Vector2d(1.2, 0.19));
  EXPECT_LT(on_axis, off_axis);
  EXPECT_GE(on_axis, params_.munder);
}

TEST_F(CubbyTest, WaypointGateClosesOnCenterLine) {
  EXPECT_LT(WaypointGate(scene_, params_, Eigen::Vector2d(0.5, 0.0)), 0.1);
  EXPECT_GT(WaypointGate(scene_, params_, Eigen::Vector2d(0.5, 0.5)), 0.9);
}

TEST_F(CubbyTest, CollisionDistanceIsToNearestWall) {
  const CubbyTerms t = MakeCubbyTerms(scene_, params_);
  Vec p(2);
  p << 1.2, 0.1;
  EXPECT_NEAR(t.collision->task_map()->Evaluate(p, Vec::Zero(2)).x[0], 0.1, 1e-12);
}

}  // namespace
}  // namespace fabrics
