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

#include "fabrics/transform_tree.h"

#include <algorithm>
#include <utility>

#include <fmt/format.h>

#include "fabrics/errors.h"

namespace fabrics {

TransformTree::TransformTree(int root_dim) {
  if (root_dim <= 0) throw DimensionError("root dimension must be positive");
  nodes_.push_back(Node{-1, root_dim, nullptr, "root"});
}

int TransformTree::AddNode(int parent, TaskMapPtr edge, std::string name) {
  if (parent < 0 || parent >= node_count()) {
    throw InvalidValueError(fmt::format("unknown parent node {}", parent));
  }
  if (!edge) throw InvalidValueError("node edge is null");
  if (edge->parent_dim() != nodes_[parent].dim) {
    throw DimensionError(fmt::format("edge '{}' expects parent dim {}, node {} has dim {}",
                                     edge->kind(), edge->parent_dim(), parent,
                                     nodes_[parent].dim));
  }
  const int id = node_count();
  if (name.empty()) name = fmt::format("node{}", id);
  nodes_.push_back(Node{parent, edge->child_dim(), std::move(edge), std::move(name)});
  return id;
}

void TransformTree::AttachTerm(int node, TermPtr term) {
  if (node < 0 || node >= node_count()) {
    throw InvalidValueError(fmt::format("unknown node {}", node));
  }
  if (!term) throw InvalidValueError("term is null");
  if (term->task_map()->parent_dim() != nodes_[node].dim) {
    throw DimensionError(fmt::format("term '{}' expects dim {}, node {} has dim {}", term->name(),
                                     term->task_map()->parent_dim(), node, nodes_[node].dim));
  }
  attachments_.push_back({node, std::move(term)});
}

ForwardState TransformTree::Forward(const Vec& q, const Vec& qd) const {
  if (q.size() != root_dim() || qd.size() != root_dim()) {
    throw DimensionError(fmt::format("root state must have dim {}", root_dim()));
  }
  ForwardState state;
  state.q = q;
  state.qd = qd;
  state.nodes.resize(nodes_.size());
  const auto n = q.size();
  state.nodes[0] = NodeState{q, qd, TaskMapEval{q, Mat::Identity(n, n), Vec::Zero(n)}};
  // Parents always precede children in id order.
  for (int id = 1; id < node_count(); ++id) {
    const Node& node = nodes_[id];
    const NodeState& parent = state.nodes[node.parent];
    TaskMapEval edge = node.edge->Evaluate(parent.x, parent.xd);
    NodeState& s = state.nodes[id];
    s.chain = ComposeEvals(parent.chain, edge);
    s.x = s.chain.x;
    s.xd = edge.jacobian * parent.xd;
  }
  return state;
}

RootResolution TransformTree::Backward(const ForwardState& state, bool with_potential) const {
  const int n = root_dim();
  RootResolution res;
  res.energy = SpecValue::Zero(n);
  res.policy = SpecValue::Zero(n);
  res.forcing = SpecValue::Zero(n);
  res.exec_energy = SpecValue::Zero(n);

  for (const Attachment& a : attachments_) {
    const NodeState& node = state.nodes.at(a.node);
    const FabricTerm& term = *a.term;
    TaskMapEval edge = term.task_map()->Evaluate(node.x, node.xd);
    const Vec xd = edge.jacobian * node.xd;
    const TaskMapEval chain = ComposeEvals(node.chain, edge);
    TermEval ev;
    try {
      ev = term.Evaluate(edge.x, xd, with_potential);
    } catch (const BarrierDomainError& e) {
      throw BarrierDomainError(fmt::format("{}/{}", nodes_[a.node].name, e.where()), e.value());
    }

    if (term.barrier() != BarrierKind::kNone) {
      res.min_barrier_distance = std::min(res.min_barrier_distance, edge.x[0]);
      if (term.barrier() == BarrierKind::kObstacle) {
        res.min_obstacle_distance = std::min(res.min_obstacle_distance, edge.x[0]);
      }
    }

    const Mat& m = ev.energy.tensor;
    switch (term.role()) {
      case TermRole::kGeometric:
        res.energy = res.energy + PullbackSpec(ev.energy.spec(), chain);
        res.policy = res.policy + PullbackSpec(SpecValue(m, -(m * ev.policy)), chain);
        res.fabric_energy += ev.energy.energy;
        res.fabric_hamiltonian += ev.energy.hamiltonian;
        ++res.geometric_terms;
        break;
      case TermRole::kForcing:
        res.energy = res.energy + PullbackSpec(ev.energy.spec(), chain);
        res.forcing = res.forcing + PullbackSpec(SpecValue(m, ev.potential_gradient), chain,
                                                 CurvatureTransport::kCovectorOnly);
        res.fabric_energy += ev.energy.energy;
        res.fabric_hamiltonian += ev.energy.hamiltonian;
        res.potential += ev.potential;
        ++res.forcing_terms;
        break;
      case TermRole::kExecutionEnergy:
        res.exec_energy = res.exec_energy + PullbackSpec(ev.energy.spec(), chain);
        res.exec_energy_value += ev.energy.energy;
        break;
    }
  }
  return res;
}

Vec TransformTree::PotentialGradient(const Vec& q) const {
  const ForwardState state = Forward(q, Vec::Zero(q.size()));
  Vec grad = Vec::Zero(root_dim());
  for (const Attachment& a : attachments_) {
    if (a.term->role() != TermRole::kForcing) continue;
    const NodeState& node = state.nodes[a.node];
    const TaskMapEval edge = a.term->task_map()->Evaluate(node.x, node.xd);
    const Mat j = node.chain.jacobian.transpose() * edge.jacobian.transpose();
    grad += j * a.term->PotentialGradient(edge.x);
  }
  return grad;
}

RootSolution ResolveRoot(const RootResolution& resolution, double ridge) {
  RootSolution out;
  out.metric = resolution.energy.metric();
  // The policy force is a sum of J^T M_i (...) terms, so it lies in the range
  // of the policy metric.
  out.pi0 = -RangeRidgeSolve(resolution.policy.metric(), resolution.policy.force(), ridge);
  out.a_psi = -RidgeSolve(out.metric, resolution.forcing.force(), ridge);
  return out;
}

}  // namespace fabrics
