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

#include "fabrics/spec_algebra.h"

#include <vector>

#include <gtest/gtest.h>

#include "fabrics/errors.h"
#include "fabrics/random.h"
#include "oracle.h"

namespace fabrics {
namespace {

TEST(SpecAlgebraTest, SumIsEntrywise) {
  Sampler s(1);
  const SpecValue a = oracle::RandomSpec(s, 3);
  const SpecValue b = oracle::RandomSpec(s, 3);
  const SpecValue c = a + b;
  EXPECT_TRUE(c.metric().isApprox(a.metric() + b.metric()));
  EXPECT_TRUE(c.force().isApprox(a.force() + b.force()));
}

TEST(SpecAlgebraTest, SumRejectsMixedDims) {
  EXPECT_THROW(SpecValue::Zero(2) + SpecValue::Zero(3), DimensionError);
}

TEST(SpecAlgebraTest, RejectsIndefiniteAndNonFinite) {
  Mat m = Mat::Identity(2, 2);
  m(1, 1) = -1.0;
  EXPECT_THROW(SpecValue(m, Vec::Zero(2)), InvalidValueError);
  Vec f = Vec::Zero(2);
  f[0] = std::nan("");
  EXPECT_THROW(SpecValue(Mat::Identity(2, 2), f), InvalidValueError);
  Mat asym = Mat::Identity(2, 2);
  asym(0, 1) = 1.0;
  EXPECT_THROW(SpecValue(asym, Vec::Zero(2)), InvalidValueError);
}

TEST(SpecAlgebraTest, PullbackThroughIdentityIsUnchanged) {
  Sampler s(2);
  const SpecValue a = oracle::RandomSpec(s, 3);
  const SpecValue p = PullbackSpec(a, IdentityMap(3).Evaluate(Vec::Zero(3), Vec::Zero(3)));
  EXPECT_TRUE(p.metric().isApprox(a.metric()));
  EXPECT_TRUE(p.force().isApprox(a.force()));
}

TEST(SpecAlgebraTest, PullbackMatchesDifferencedMap) {
  Sampler s(3);
  const PlanarArm arm({1.0, 0.8, 0.6});
  const BodyPointMap map(arm, BodyPoint{2, 1.0});
  for (int i = 0; i < 100; ++i) {
    const SpecValue child = oracle::RandomSpec(s, 2);
    const Vec q = s.UniformVec(3, -3.0, 3.0);
    const Vec qd = s.UniformVec(3, -1.0, 1.0);
    EXPECT_LT(oracle::CheckPullback(child, map, q, qd), 1e-5);
  }
}

TEST(SpecAlgebraTest, CovectorTransportSkipsCurvature) {
  const PlanarArm arm({1.0, 1.0});
  const TaskMapEval e = arm.Jacobian(Vec::Constant(2, 0.4), Vec::Constant(2, 1.0), {1, 1.0});
  const SpecValue child(Mat::Identity(2, 2), Vec::Constant(2, 1.0));
  const SpecValue p = PullbackSpec(child, e, CurvatureTransport::kCovectorOnly);
  EXPECT_TRUE(p.force().isApprox(e.jacobian.transpose() * child.force()));
}

TEST(SpecAlgebraTest, PullbackRejectsWrongChildDim) {
  const TaskMapEval e = IdentityMap(3).Evaluate(Vec::Zero(3), Vec::Zero(3));
  EXPECT_THROW(PullbackSpec(SpecValue::Zero(2), e), DimensionError);
}

TEST(SpecAlgebraTest, ResolveAndNaturalFormRoundTrip) {
  Sampler s(4);
  for (int i = 0; i < 20; ++i) {
    Mat a(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a(r, c) = s.Uniform(-1.0, 1.0);
    const SpecValue spec(a * a.transpose() + Mat::Identity(3, 3), s.UniformVec(3, -1, 1));
    const PolicyValue p = ResolvePolicy(spec, 0.0);
    EXPECT_LT((spec.metric() * p.acceleration + spec.force()).norm(), 1e-12);
    const SpecValue back = ToNaturalForm(p);
    EXPECT_TRUE(back.force().isApprox(spec.force(), 1e-12));
  }
}

TEST(SpecAlgebraTest, ResolveReportsSingularMetric) {
  ResolveDiagnostics d;
  ResolvePolicy(SpecValue::Zero(2), kDefaultRidge, &d);
  EXPECT_TRUE(d.below_ridge);
}

TEST(SpecAlgebraTest, MetricWeightedAverageOfEqualMetricsIsMean) {
  const std::vector<PolicyValue> terms = {
      {Mat::Identity(2, 2), Vec::Constant(2, 1.0)},
      {Mat::Identity(2, 2), Vec::Constant(2, 3.0)}};
  const PolicyValue avg = MetricWeightedAverage(terms, 0.0);
  EXPECT_NEAR(avg.acceleration[0], 2.0, 1e-12);
  EXPECT_TRUE(avg.metric.isApprox(2.0 * Mat::Identity(2, 2)));
  EXPECT_THROW(MetricWeightedAverage(std::vector<PolicyValue>{}), InvalidValueError);
}

TEST(SpecAlgebraTest, ZeroMetricTermDoesNotVote) {
  const std::vector<PolicyValue> terms = {
      {Mat::Identity(2, 2), Vec::Constant(2, 1.0)},
      {Mat::Zero(2, 2), Vec::Constant(2, 100.0)}};
  EXPECT_NEAR(MetricWeightedAverage(terms, 0.0).acceleration[1], 1.0, 1e-12);
}

TEST(SpecAlgebraTest, RangeRidgeSolveDropsNullComponent) {
  // Rank one metric with a large eigenvalue, as from a single barrier.
  const Vec u = Vec::Constant(2, 1.0 / std::sqrt(2.0));
  const Vec w(Vec::Unit(2, 0) - Vec::Unit(2, 1));
  const Mat m = 3e5 * u * u.transpose();
  const Vec b = 2.0 * u;
  const Vec expected = u * (2.0 / (3e5 + kDefaultRidge));
  EXPECT_LT((RangeRidgeSolve(m, b) - expected).norm(), 1e-15);
  // Round-off outside the range is ignored rather than amplified by 1/ridge.
  const Vec noisy = b + 1e-11 * w;
  EXPECT_LT((RangeRidgeSolve(m, noisy) - expected).norm(), 1e-15);
  EXPECT_GT((RidgeSolve(m, noisy) - expected).norm(), 1e-6);
}

TEST(SpecAlgebraTest, RangeRidgeSolveMatchesRidgeSolveOnFullRank) {
  Sampler s(5);
  for (int i = 0; i < 20; ++i) {
    Mat a(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a(r, c) = s.Uniform(-1.0, 1.0);
    const Mat m = a * a.transpose() + 0.1 * Mat::Identity(3, 3);
    const Vec b = s.UniformVec(3, -1, 1);
    EXPECT_TRUE(RangeRidgeSolve(m, b).isApprox(RidgeSolve(m, b), 1e-10));
  }
}

}  // namespace
}  // namespace fabrics
