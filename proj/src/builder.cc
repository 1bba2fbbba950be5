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

#include "fabrics/builder.h"

#include <map>
#include <string>

#include <fmt/format.h>

#include "fabrics/errors.h"

namespace fabrics {
namespace {

Vec ToVec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::Vector2d ToVec2(const std::vector<double>& v) {
  if (v.size() < 2) throw InvalidValueError("expected a planar point");
  return Eigen::Vector2d(v[0], v[1]);
}

}  // namespace

PolicyKind PolicyFor(Channel channel, FabricStyle style) {
  switch (channel) {
    case Channel::kGeometric:
      return PolicyKind::kGeometricHd2;
    case Channel::kForcing:
      return PolicyKind::kForcingPotential;
    case Channel::kStyle:
      break;
  }
  return style == FabricStyle::kGeometric ? PolicyKind::kGeometricHd2
                                          : PolicyKind::kForcingPotential;
}

ControllerConfig MakeController(const ControllerSpec& spec, double exec_scale) {
  ControllerConfig c;
  c.mode = spec.mode;
  c.speed = spec.speed;
  c.speed.exec_target = 0.5 * exec_scale * spec.desired_speed * spec.desired_speed;
  c.beta = spec.beta;
  return c;
}

BuiltSystem BuildSystem(const ScenarioConfig& config, const VariantConfig& variant) {
  BuiltSystem out;
  const int n = config.dim();
  auto tree = std::make_shared<TransformTree>(n);
  const bool is_arm = config.robot.kind == RobotKind::kPlanarArm;
  if (is_arm) out.arm = PlanarArm(config.robot.link_lengths, config.robot.base);

  std::map<std::string, int> ids = {{"root", 0}};
  for (const NodeConfig& node : config.nodes) {
    TaskMapPtr edge;
    if (node.edge.kind == "body_point") {
      edge = std::make_shared<BodyPointMap>(*out.arm, BodyPoint{node.edge.link, node.edge.offset});
    } else {
      edge = std::make_shared<IdentityMap>(tree->node_dim(ids.at(node.parent)));
    }
    ids[node.name] = tree->AddNode(ids.at(node.parent), edge, node.name);
  }

  // Collision nodes are created on first use.
  std::vector<int> collision_ids;
  auto collision_nodes = [&]() -> const std::vector<int>& {
    if (collision_ids.empty()) {
      std::vector<BodyPoint> points = config.collision_points;
      if (points.empty()) points = out.arm->DefaultCollisionPoints();
      for (std::size_t i = 0; i < points.size(); ++i) {
        collision_ids.push_back(tree->AddNode(
            0, std::make_shared<BodyPointMap>(*out.arm, points[i]), fmt::format("cp{}", i)));
      }
    }
    return collision_ids;
  };
  auto resolve = [&](const std::vector<std::string>& names) {
    std::vector<int> result;
    for (const std::string& name : names) {
      if (name == "collision_points") {
        const auto& cps = collision_nodes();
        result.insert(result.end(), cps.begin(), cps.end());
      } else {
        result.push_back(ids.at(name));
      }
    }
    return result;
  };

  // The task attractor is always a forcing term.
  const int objective_node = ids.at(config.objective.node);
  AttractorParams ap;
  const AttractorConfig& oa = config.objective.attractor;
  ap.target = ToVec(oa.target);
  ap.k = oa.k;
  ap.alpha_psi = oa.alpha_psi;
  ap.mbar = oa.mbar;
  ap.munder = oa.munder;
  ap.alpha_m = oa.alpha_m;
  tree->AttachTerm(objective_node, AttractorTerm(ap, PolicyKind::kForcingPotential, "objective"));
  if (ap.target.size() >= 2) out.target = ap.target.head<2>();

  for (const TermConfig& t : config.terms) {
    const PolicyKind kind = PolicyFor(t.channel, variant.style);
    const std::vector<int> nodes = resolve(t.nodes);
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ObstacleConfig>) {
            ObstacleParams op;
            op.origin = ToVec(p.center);
            op.radius = p.radius;
            op.k_b = p.k_b;
            op.alpha_b = p.alpha_b;
            op.metric = variant.barrier_metric;
            const TermPtr term = ObstacleTerm(op, kind, t.name);
            for (int node : nodes) tree->AttachTerm(node, term);
            if (p.center.size() == 2) out.circles.push_back({ToVec2(p.center), p.radius});
          } else if constexpr (std::is_same_v<T, JointLimitConfig>) {
            JointLimitParams jp;
            jp.lower = config.robot.lower;
            jp.upper = config.robot.upper;
            jp.lambda = p.lambda;
            jp.potential = p.potential;
            jp.metric = variant.barrier_metric;
            for (const TermPtr& term : JointLimitTerms(jp, kind)) {
              for (int node : nodes) tree->AttachTerm(node, term);
            }
          } else if constexpr (std::is_same_v<T, DefaultConfigConfig>) {
            DefaultConfigParams dp;
            dp.q0 = ToVec(p.q0);
            dp.lambda_dc = p.lambda_dc;
            dp.k = p.k;
            dp.alpha_psi = p.alpha_psi;
            const TermPtr term = DefaultConfigTerm(dp, kind, t.name);
            for (int node : nodes) tree->AttachTerm(node, term);
          } else if constexpr (std::is_same_v<T, AttractorConfig>) {
            AttractorParams a;
            a.target = ToVec(p.target);
            a.k = p.k;
            a.alpha_psi = p.alpha_psi;
            a.mbar = p.mbar;
            a.munder = p.munder;
            a.alpha_m = p.alpha_m;
            const TermPtr term = AttractorTerm(a, kind, t.name);
            for (int node : nodes) tree->AttachTerm(node, term);
          } else if constexpr (std::is_same_v<T, CubbyConfig>) {
            CubbyScene scene;
            scene.opening_center = ToVec2(p.opening_center);
            scene.outward_normal = ToVec2(p.outward_normal).normalized();
            scene.width = p.width;
            scene.depth = p.depth;
            scene.target = ToVec2(p.target);
            const CubbyTerms terms = MakeCubbyTerms(scene, p.params);
            for (int node : nodes) {
              tree->AttachTerm(node, terms.extraction);
              tree->AttachTerm(node, terms.target_attraction);
              tree->AttachTerm(node, terms.waypoint);
            }
            if (is_arm) {
              for (int node : collision_nodes()) tree->AttachTerm(node, terms.collision);
            }
            const auto walls = scene.Walls();
            out.walls.insert(out.walls.end(), walls.begin(), walls.end());
          }
        },
        t.params);
  }
  tree->AttachTerm(0, ExecutionEnergyTerm(n, config.execution_energy_scale));

  // Offset of the objective node from the target.
  std::shared_ptr<const TransformTree> const_tree = tree;
  const Vec target = ap.target;
  GoalFn goal = [const_tree, objective_node, target](const Vec& q) -> Vec {
    if (objective_node == 0) return q - target;
    const ForwardState s = const_tree->Forward(q, Vec::Zero(q.size()));
    return s.nodes[objective_node].x - target;
  };
  out.tree = const_tree;
  out.system = std::make_shared<const FabricSystem>(
      const_tree, MakeController(variant.controller, config.execution_energy_scale), goal);
  if (is_arm) {
    const PlanarArm arm = *out.arm;
    out.path_point = [arm](const Vec& q) { return arm.Fk(q, arm.end_effector()); };
  } else {
    out.path_point = [](const Vec& q) -> Eigen::Vector2d {
      return Eigen::Vector2d(q[0], q.size() > 1 ? q[1] : 0.0);
    };
  }
  return out;
}

}  // namespace fabrics
