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

// Declarative scenario files: schema, loading with line-numbered errors, and
// a canonical echo in which every default is spelled out.

#ifndef FABRICS_SCENARIO_H_
#define FABRICS_SCENARIO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fabrics/geometry.h"
#include "fabrics/kinematics.h"
#include "fabrics/runtime.h"

namespace fabrics {

enum class FabricStyle { kGeometric, kLagrangian };
enum class RobotKind { kParticle, kPlanarArm };

// Which channel a behavior term is built for. kStyle follows the variant.
enum class Channel { kStyle, kGeometric, kForcing };

struct RobotConfig {
  RobotKind kind = RobotKind::kParticle;
  int dim = 2;  // particle only
  std::vector<double> link_lengths;
  BasePose base;
  std::vector<double> lower;  // joint limits, arm only
  std::vector<double> upper;
};

struct EdgeConfig {
  std::string kind = "body_point";  // body_point | identity
  int link = 0;
  double offset = 1.0;
};

struct NodeConfig {
  std::string name;
  std::string parent = "root";
  EdgeConfig edge;
};

struct AttractorConfig {
  std::vector<double> target;
  double k = 10.0;
  double alpha_psi = 10.0;
  double mbar = 2.0;
  double munder = 0.2;
  double alpha_m = 0.75;
};

struct ObstacleConfig {
  std::vector<double> center;
  double radius = 1.0;
  double k_b = 20.0;
  double alpha_b = 1.0;
};

struct JointLimitConfig {
  double lambda = 0.25;
  LimitPotential potential;
};

struct DefaultConfigConfig {
  std::vector<double> q0;
  double lambda_dc = 0.5;
  double k = 1.0;
  double alpha_psi = 10.0;
};

struct CubbyConfig {
  std::vector<double> opening_center;
  std::vector<double> outward_normal;
  double width = 0.4;
  double depth = 0.4;
  std::vector<double> target;
  CubbyParams params;
};

using TermParams =
    std::variant<AttractorConfig, ObstacleConfig, JointLimitConfig, DefaultConfigConfig, CubbyConfig>;

struct TermConfig {
  std::string name;
  // Node names; "collision_points" expands to every collision node.
  std::vector<std::string> nodes;
  Channel channel = Channel::kStyle;
  TermParams params;

  std::string_view kind() const;
};

struct ObjectiveConfig {
  std::string node = "root";
  AttractorConfig attractor;
};

struct ControllerSpec {
  DampingMode mode = DampingMode::kSpeedControl;
  double desired_speed = 2.0;  // execution energy target 1/2 v_d^2
  double beta = 4.0;
  SpeedControlParams speed;  // exec_target is derived from desired_speed
};

struct InitialState {
  std::vector<double> q;
  std::vector<double> qd;
};

struct RandomStates {
  int count = 0;
  std::uint64_t seed = 0;
  std::vector<double> q_lower;
  std::vector<double> q_upper;
  double max_speed = 0.0;  // each velocity component uniform in [-max, max]
};

struct VariantConfig {
  std::string name;
  FabricStyle style = FabricStyle::kGeometric;
  BarrierMetric barrier_metric = BarrierMetric::kVelocityGated;
  ControllerSpec controller;
};

struct OutputConfig {
  bool csv = true;
  bool dat = true;
  bool svg = true;
};

struct ScenarioConfig {
  std::string name;
  RobotConfig robot;
  std::vector<NodeConfig> nodes;
  // Arm only. Defaults to PlanarArm::DefaultCollisionPoints when empty and
  // some term refers to "collision_points".
  std::vector<BodyPoint> collision_points;
  ObjectiveConfig objective;
  std::vector<TermConfig> terms;
  double execution_energy_scale = 1.0;
  ControllerSpec controller;
  IntegratorConfig integrator;
  ConvergenceCriteria convergence;
  std::vector<InitialState> initial_states;
  std::optional<RandomStates> random_states;
  // Always non-empty after parsing: a missing section becomes one geometric
  // variant named "default" using the scenario controller.
  std::vector<VariantConfig> variants;
  OutputConfig outputs;

  int dim() const;
  // Explicit states followed by the seeded random ones.
  std::vector<InitialState> AllInitialStates() const;
  const VariantConfig* FindVariant(const std::string& name) const;
};

// Throws ConfigError with `source` and a 1-based line when possible.
ScenarioConfig ParseScenario(const std::string& text, const std::string& source = "");
ScenarioConfig LoadScenario(const std::string& path);

// Semantic checks beyond the schema (dims, node references, limits).
void ValidateScenario(const ScenarioConfig& config, const std::string& source = "");

// Canonical YAML with every field present.
std::string EchoScenario(const ScenarioConfig& config);

std::string_view StyleName(FabricStyle style);
std::string_view ModeName(DampingMode mode);
std::string_view BarrierMetricName(BarrierMetric metric);

}  // namespace fabrics

#endif  // FABRICS_SCENARIO_H_
