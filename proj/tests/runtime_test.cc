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

#include "fabrics/runtime.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <tuple>

#include <gtest/gtest.h>

#include "fabrics/errors.h"
#include "fabrics/geometry.h"

namespace fabrics {
namespace {

// Harmonic oscillator qdd = -w^2 q from q = 1, qd = 0; exact q(t) = cos(w t).
double OscillatorError(double dt, Integrator method) {
  const double w = 2.0;
  const AccelFn accel = [w](const Vec& q, const Vec&) { return Vec(-w * w * q); };
  Vec q = Vec::Ones(1), qd = Vec::Zero(1);
  const int steps = static_cast<int>(std::lround(2.0 / dt));
  for (int k = 0; k < steps; ++k) std::tie(q, qd) = Step(accel, q, qd, dt, method);
  return std::abs(q[0] - std::cos(w * steps * dt));
}

TEST(RuntimeTest, Rk4IsFourthOrder) {
  const double coarse = OscillatorError(0.02, Integrator::kRk4);
  const double fine = OscillatorError(0.01, Integrator::kRk4);
  EXPECT_LT(coarse, 1e-6);
  EXPECT_NEAR(std::log2(coarse / fine), 4.0, 0.2);
}

TEST(RuntimeTest, EulerIsFirstOrder) {
  const double coarse = OscillatorError(0.002, Integrator::kEuler);
  const double fine = OscillatorError(0.001, Integrator::kEuler);
  EXPECT_NEAR(std::log2(coarse / fine), 1.0, 0.1);
}

TEST(RuntimeTest, IntegratorConfigValidation) {
  IntegratorConfig c;
  c.dt = 0.01;
  c.duration = 1.0;
  EXPECT_EQ(c.steps(), 100);
  c.dt = 0.0;
  EXPECT_THROW(c.Validate(), InvalidValueError);
}

class ParticleRollout : public ::testing::Test {
 protected:
  std::shared_ptr<FabricSystem> Make(DampingMode mode) {
    auto tree = std::make_shared<TransformTree>(2);
    AttractorParams a;
    a.target = target_;
    tree->AttachTerm(0, AttractorTerm(a, PolicyKind::kForcingPotential));
    tree->AttachTerm(0, ExecutionEnergyTerm(2, 1.0));
    ControllerConfig c;
    c.mode = mode;
    c.speed.exec_target = 0.5 * 1.5 * 1.5;
    // A sharp gate keeps 1 - s_beta, and with it the boost, negligible at the goal.
    c.speed.alpha_beta = 10.0;
    const Vec target = target_;
    return std::make_shared<FabricSystem>(tree, c,
                                          [target](const Vec& q) { return Vec(q - target); });
  }
  IntegratorConfig Config(double duration) const {
    IntegratorConfig c;
    c.dt = 0.01;
    c.duration = duration;
    return c;
  }
  Vec target_ = Vec::Constant(2, -1.0);
};

TEST_F(ParticleRollout, BasicDampingConverges) {
  const auto sys = Make(DampingMode::kBasicDamping);
  const Trajectory t = Rollout(*sys, Vec::Constant(2, 1.0), Vec::Zero(2), Config(15.0));
  ASSERT_EQ(t.size(), 1500);
  EXPECT_DOUBLE_EQ(t.times[10], 0.1);
  const ConvergenceReport r = DetectConvergence(t, ConvergenceCriteria{});
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.final_distance, 1e-3);
}

TEST_F(ParticleRollout, SpeedControlConvergesAndStopsEarly) {
  const auto sys = Make(DampingMode::kSpeedControl);
  RolloutOptions opt;
  opt.stop_on_convergence = ConvergenceCriteria{};
  const Trajectory t = Rollout(*sys, Vec::Constant(2, 2.0), Vec::Zero(2), Config(30.0), opt);
  EXPECT_EQ(t.termination, Termination::kConverged);
  EXPECT_LT(t.size(), 3000);
  EXPECT_TRUE(DetectConvergence(t, ConvergenceCriteria{}).converged);
}

TEST_F(ParticleRollout, HamiltonianDecreasesUnderDamping) {
  const auto sys = Make(DampingMode::kBasicDamping);
  const Trajectory t = Rollout(*sys, Vec::Constant(2, 1.0), Vec::Ones(2), Config(5.0));
  for (int k = 1; k < t.size(); ++k) {
    EXPECT_LE(t.hamiltonian[k], t.hamiltonian[k - 1] + 1e-9);
  }
}

TEST_F(ParticleRollout, WrongInitialDimensionThrows) {
  const auto sys = Make(DampingMode::kBasicDamping);
  EXPECT_THROW(Rollout(*sys, Vec::Zero(3), Vec::Zero(3), Config(1.0)), DimensionError);
}

TEST_F(ParticleRollout, BarrierViolationIsRecorded) {
  auto tree = std::make_shared<TransformTree>(2);
  ObstacleParams o;
  o.origin = Vec::Zero(2);
  tree->AttachTerm(0, ObstacleTerm(o, PolicyKind::kForcingPotential));
  tree->AttachTerm(0, ExecutionEnergyTerm(2, 1.0));
  ControllerConfig c;
  c.mode = DampingMode::kEnergized;
  FabricSystem sys(tree, c, [](const Vec& q) { return q; });
  // Starts inside the obstacle.
  const Trajectory t = Rollout(sys, Vec::Constant(2, 0.1), Vec::Zero(2), Config(1.0));
  EXPECT_EQ(t.termination, Termination::kBarrierViolation);
  EXPECT_TRUE(t.failed());
  EXPECT_FALSE(t.failure_message.empty());
  EXPECT_EQ(t.failure_step, 0);
  EXPECT_EQ(t.size(), 0);
  EXPECT_THROW(DetectConvergence(t, ConvergenceCriteria{}), InvalidValueError);
}

TEST_F(ParticleRollout, CsvHasOneRowPerSample) {
  const auto sys = Make(DampingMode::kBasicDamping);
  const Trajectory t = Rollout(*sys, Vec::Constant(2, 1.0), Vec::Zero(2), Config(0.5));
  std::ostringstream out;
  WriteCsv(t, out);
  const std::string csv = out.str();
  EXPECT_EQ(csv.rfind("t,q0,q1,qd0,qd1,qdd0,qdd1,L_e", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), t.size() + 1);
}

TEST(ConvergenceTest, NeedsTheWholeWindow) {
  Trajectory t;
  t.dt = 0.01;
  for (int k = 0; k < 100; ++k) {
    t.times.push_back(k * 0.01);
    t.q.push_back(Vec::Zero(1));
    t.qd.push_back(Vec::Constant(1, k < 60 ? 1.0 : 0.0));
    t.goal_distance.push_back(0.0);
  }
  ConvergenceCriteria c;
  c.window = 40;
  ConvergenceReport r = DetectConvergence(t, c);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.converged_step, 60);
  c.window = 41;
  EXPECT_FALSE(DetectConvergence(t, c).converged);
}

}  // namespace
}  // namespace fabrics
