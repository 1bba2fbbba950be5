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

// Tree of task spaces. Terms attached to nodes are pulled back to the root
// in four channels: fabric energy, geometric policy, forcing and execution
// energy.

#ifndef FABRICS_TRANSFORM_TREE_H_
#define FABRICS_TRANSFORM_TREE_H_

#include <limits>
#include <string>
#include <vector>

#include "fabrics/geometry.h"
#include "fabrics/spec_algebra.h"
#include "fabrics/task_map.h"

namespace fabrics {

struct NodeState {
  Vec x;
  Vec xd;
  TaskMapEval chain;  // root -> node composite
};

struct ForwardState {
  Vec q;
  Vec qd;
  std::vector<NodeState> nodes;  // indexed by node id, root is 0
};

struct RootResolution {
  SpecValue energy = SpecValue::Zero(0);
  SpecValue policy = SpecValue::Zero(0);
  SpecValue forcing = SpecValue::Zero(0);
  SpecValue exec_energy = SpecValue::Zero(0);

  double fabric_energy = 0.0;       // L_e summed over geometric and forcing terms
  double fabric_hamiltonian = 0.0;  // H_e
  double exec_energy_value = 0.0;   // L_ex
  double potential = 0.0;           // Psi, filled when requested
  double min_barrier_distance = std::numeric_limits<double>::infinity();
  double min_obstacle_distance = std::numeric_limits<double>::infinity();
  int forcing_terms = 0;
  int geometric_terms = 0;
};

struct RootSolution {
  Mat metric;  // energy-channel metric
  Vec pi0;     // geometric acceleration
  Vec a_psi;   // forcing acceleration
};

class TransformTree {
 public:
  explicit TransformTree(int root_dim);

  int root_dim() const { return nodes_.front().dim; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int node_dim(int id) const { return nodes_.at(id).dim; }
  const std::string& node_name(int id) const { return nodes_.at(id).name; }

  // Returns the new node id.
  int AddNode(int parent, TaskMapPtr edge, std::string name = "");
  void AttachTerm(int node, TermPtr term);

  ForwardState Forward(const Vec& q, const Vec& qd) const;
  // Throws BarrierDomainError labeled with the node when a term leaves its
  // domain.
  RootResolution Backward(const ForwardState& state, bool with_potential = false) const;
  RootResolution Evaluate(const Vec& q, const Vec& qd, bool with_potential = false) const {
    return Backward(Forward(q, qd), with_potential);
  }

  // Sum of grad Psi pulled to the root (covector transport).
  Vec PotentialGradient(const Vec& q) const;

  // Node and term ids in attachment order, for reporting.
  struct Attachment {
    int node;
    TermPtr term;
  };
  const std::vector<Attachment>& attachments() const { return attachments_; }

 private:
  struct Node {
    int parent = -1;
    int dim = 0;
    TaskMapPtr edge;
    std::string name;
  };

  std::vector<Node> nodes_;
  std::vector<Attachment> attachments_;
};

RootSolution ResolveRoot(const RootResolution& resolution, double ridge = kDefaultRidge);

}  // namespace fabrics

#endif  // FABRICS_TRANSFORM_TREE_H_
