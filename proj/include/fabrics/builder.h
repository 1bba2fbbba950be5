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

// Turns a scenario and one of its variants into a transform tree and a
// fabric system.

#ifndef FABRICS_BUILDER_H_
#define FABRICS_BUILDER_H_

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fabrics/runtime.h"
#include "fabrics/scenario.h"

namespace fabrics {

struct Circle {
  Eigen::Vector2d center;
  double radius = 0.0;
};

struct BuiltSystem {
  std::shared_ptr<const TransformTree> tree;
  std::shared_ptr<const FabricSystem> system;
  std::optional<PlanarArm> arm;
  // Planar point traced for paths: the end effector, or the particle itself.
  std::function<Eigen::Vector2d(const Vec& q)> path_point;
  // Planar obstacles and cubby walls, for plotting.
  std::vector<Circle> circles;
  std::vector<Segment> walls;
  Eigen::Vector2d target = Eigen::Vector2d::Zero();
};

PolicyKind PolicyFor(Channel channel, FabricStyle style);
// The execution energy is exec_scale/2 |qd|^2, so the target for speed v_d is
// exec_scale/2 v_d^2.
ControllerConfig MakeController(const ControllerSpec& spec, double exec_scale = 1.0);
BuiltSystem BuildSystem(const ScenarioConfig& config, const VariantConfig& variant);

}  // namespace fabrics

#endif  // FABRICS_BUILDER_H_
