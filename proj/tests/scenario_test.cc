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

#include "fabrics/scenario.h"

#include <string>

#include <gtest/gtest.h>

#include "fabrics/errors.h"

namespace fabrics {
namespace {

const std::string kDir = FABRICS_SCENARIO_DIR;

constexpr const char* kMinimal = R"(
name: minimal
robot: {kind: particle, dim: 2}
objective: {target: [1.0, 0.0]}
initial_states:
  - {q: [0.0, 0.0]}
)";

constexpr const char* kArmNoLimits = R"(
name: arm
robot:
  kind: planar_arm
  link_lengths: [1.0, 1.0]
objective: {target: [1.0, 0.0]}
initial_states:
  - {q: [0.0, 0.0]}
)";

TEST(ScenarioTest, MinimalScenarioRoundTrips) {
  const ScenarioConfig first = ParseScenario(kMinimal);
  const std::string echo = EchoScenario(first);
  const ScenarioConfig second = ParseScenario(echo);
  EXPECT_EQ(EchoScenario(second), echo);
  ASSERT_EQ(first.variants.size(), 1u);
  EXPECT_EQ(first.variants[0].name, "default");
  EXPECT_EQ(first.initial_states[0].qd, std::vector<double>({0.0, 0.0}));
}

TEST(ScenarioTest, ShippedScenariosRoundTrip) {
  for (const char* name :
       {"particle_grid", "speed_vs_damping", "energy_conservation", "planar_exp1",
        "planar_exp2", "planar_exp3", "random_forced_damped", "cubby_demo"}) {
    const ScenarioConfig c = LoadScenario(kDir + "/" + name + ".yaml");
    const std::string echo = EchoScenario(c);
    EXPECT_EQ(EchoScenario(ParseScenario(echo)), echo) << name;
  }
}

TEST(ScenarioTest, MissingJointLimitsNamesTheField) {
  try {
    ParseScenario(kArmNoLimits, "arm.yaml");
    FAIL() << "expected a config error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("joint_limits"), std::string::npos) << e.what();
    EXPECT_EQ(e.file(), "arm.yaml");
  }
}

TEST(ScenarioTest, UnknownKeyReportsLine) {
  const std::string text = std::string(kMinimal) + "bogus: 1\n";
  try {
    ParseScenario(text, "x.yaml");
    FAIL() << "expected a config error";
  } catch (const ConfigError& e) {
    EXPECT_GT(e.line(), 0);
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos) << e.what();
  }
}

TEST(ScenarioTest, MalformedYamlIsConfigError) {
  EXPECT_THROW(ParseScenario("name: [unclosed\n"), ConfigError);
  EXPECT_THROW(LoadScenario(kDir + "/does_not_exist.yaml"), ConfigError);
}

TEST(ScenarioTest, DimensionMismatchIsRejected) {
  const std::string text = R"(
name: bad
robot: {kind: particle, dim: 2}
objective: {target: [1.0, 0.0, 3.0]}
initial_states:
  - {q: [0.0, 0.0]}
)";
  EXPECT_THROW(ParseScenario(text), ConfigError);
}

TEST(ScenarioTest, ParticleGridScenarioCarriesParameters) {
  const ScenarioConfig c = LoadScenario(kDir + "/particle_grid.yaml");
  const AttractorConfig& a = c.objective.attractor;
  EXPECT_EQ(a.mbar, 2.0);
  EXPECT_EQ(a.munder, 0.2);
  EXPECT_EQ(a.alpha_m, 0.75);
  EXPECT_EQ(a.k, 10.0);
  EXPECT_EQ(a.alpha_psi, 10.0);
  bool found = false;
  for (const TermConfig& t : c.terms) {
    if (const auto* o = std::get_if<ObstacleConfig>(&t.params)) {
      EXPECT_EQ(o->k_b, 20.0);
      EXPECT_EQ(o->alpha_b, 1.0);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(c.initial_states.size(), 14u);
  EXPECT_EQ(c.variants.size(), 8u);
}

TEST(ScenarioTest, PlanarLimitsMatchExperiments) {
  EXPECT_DOUBLE_EQ(LoadScenario(kDir + "/planar_exp1.yaml").robot.upper[0], M_PI);
  EXPECT_DOUBLE_EQ(LoadScenario(kDir + "/planar_exp2.yaml").robot.lower[2], -M_PI);
  EXPECT_DOUBLE_EQ(LoadScenario(kDir + "/planar_exp3.yaml").robot.upper[1], M_PI / 2 + 0.01);
}

TEST(ScenarioTest, VariantControllersInheritAndOverride) {
  const ScenarioConfig c = LoadScenario(kDir + "/speed_vs_damping.yaml");
  const VariantConfig* sc = c.FindVariant("speed_control");
  const VariantConfig* bd = c.FindVariant("basic_damping");
  ASSERT_NE(sc, nullptr);
  ASSERT_NE(bd, nullptr);
  EXPECT_EQ(sc->controller.desired_speed, 2.5);
  EXPECT_DOUBLE_EQ(sc->controller.speed.exec_target, 0.5 * 2.5 * 2.5);
  EXPECT_EQ(bd->controller.mode, DampingMode::kBasicDamping);
  EXPECT_EQ(bd->controller.beta, 4.0);
  // Untouched fields come from the scenario controller.
  EXPECT_EQ(bd->controller.speed.b_gain, c.controller.speed.b_gain);
  EXPECT_EQ(c.FindVariant("nope"), nullptr);
}

TEST(ScenarioTest, RandomStatesAreSeeded) {
  ScenarioConfig c = LoadScenario(kDir + "/random_forced_damped.yaml");
  const auto a = c.AllInitialStates();
  const auto b = c.AllInitialStates();
  ASSERT_EQ(a.size(), 20u);
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].q, b[i].q);
  c.random_states->seed += 1;
  EXPECT_NE(c.AllInitialStates()[0].q, a[0].q);
  for (const auto& s : a) {
    for (double v : s.q) {
      EXPECT_GE(v, -4.0);
      EXPECT_LE(v, 4.0);
    }
  }
}

}  // namespace
}  // namespace fabrics
