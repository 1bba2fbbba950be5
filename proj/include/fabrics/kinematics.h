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

#ifndef FABRICS_KINEMATICS_H_
#define FABRICS_KINEMATICS_H_

#include <vector>

#include <Eigen/Dense>

#include "fabrics/task_map.h"

namespace fabrics {

struct BasePose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

// A point on link `link`, `offset` in [0, 1] of the way from its proximal
// joint to its distal end.
struct BodyPoint {
  int link = 0;
  double offset = 1.0;
};

// Planar serial chain of revolute joints. Joint angles are relative to the
// previous link, counterclockwise positive.
class PlanarArm {
 public:
  explicit PlanarArm(std::vector<double> link_lengths, BasePose base = {});

  int n_joints() const { return static_cast<int>(link_lengths_.size()); }
  const std::vector<double>& link_lengths() const { return link_lengths_; }
  const BasePose& base() const { return base_; }
  BodyPoint end_effector() const { return BodyPoint{n_joints() - 1, 1.0}; }

  Eigen::Vector2d Fk(const Vec& q, BodyPoint point) const;
  // Analytic J and Jdot qd at the body point.
  TaskMapEval Jacobian(const Vec& q, const Vec& qd, BodyPoint point) const;

  // Joint locations after the (fixed) base, link midpoints and the end
  // effector.
  std::vector<BodyPoint> DefaultCollisionPoints() const;

 private:
  void CheckPoint(const Vec& q, BodyPoint point) const;

  std::vector<double> link_lengths_;
  BasePose base_;
};

// Task map q -> position of a body point.
class BodyPointMap final : public TaskMap {
 public:
  BodyPointMap(PlanarArm arm, BodyPoint point) : arm_(std::move(arm)), point_(point) {}
  std::string_view kind() const override { return "ee_position"; }
  int parent_dim() const override { return arm_.n_joints(); }
  int child_dim() const override { return 2; }
  TaskMapEval Evaluate(const Vec& q, const Vec& qd) const override {
    CheckInput(q, qd);
    return arm_.Jacobian(q, qd, point_);
  }
  BodyPoint point() const { return point_; }

 private:
  PlanarArm arm_;
  BodyPoint point_;
};

// A point particle lives directly in task space: the identity map.
inline TaskMapEval ParticleMap(const Vec& q) {
  const auto n = q.size();
  return TaskMapEval{q, Mat::Identity(n, n), Vec::Zero(n)};
}

}  // namespace fabrics

#endif  // FABRICS_KINEMATICS_H_
