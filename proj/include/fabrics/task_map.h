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

#ifndef FABRICS_TASK_MAP_H_
#define FABRICS_TASK_MAP_H_

#include <memory>
#include <string_view>
#include <vector>

#include "fabrics/spec_algebra.h"

namespace fabrics {

// Differentiable map from a parent space (dim parent_dim) to a child space.
// Evaluate returns x = phi(q), J = dphi/dq and the curvature term Jdot qdot.
class TaskMap {
 public:
  virtual ~TaskMap() = default;

  virtual std::string_view kind() const = 0;
  virtual int parent_dim() const = 0;
  virtual int child_dim() const = 0;
  virtual TaskMapEval Evaluate(const Vec& q, const Vec& qd) const = 0;

 protected:
  void CheckInput(const Vec& q, const Vec& qd) const;
};

using TaskMapPtr = std::shared_ptr<const TaskMap>;

class IdentityMap final : public TaskMap {
 public:
  explicit IdentityMap(int dim) : dim_(dim) {}
  std::string_view kind() const override { return "identity"; }
  int parent_dim() const override { return dim_; }
  int child_dim() const override { return dim_; }
  TaskMapEval Evaluate(const Vec& q, const Vec& qd) const override;

 private:
  int dim_;
};

// x = q - target.
class OffsetMap final : public TaskMap {
 public:
  explicit OffsetMap(Vec target) : target_(std::move(target)) {}
  std::string_view kind() const override { return "offset"; }
  int parent_dim() const override { return static_cast<int>(target_.size()); }
  int child_dim() const override { return parent_dim(); }
  TaskMapEval Evaluate(const Vec& q, const Vec& qd) const override;
  const Vec& target() const { return target_; }

 private:
  Vec target_;
};

// x = |q - origin| / radius - 1 (zero on the circle, negative inside).
class CircleDistanceMap final : public TaskMap {
 public:
  CircleDistanceMap(Vec origin, double radius);
  std::string_view kind() const override { return "circle_distance"; }
  int parent_dim() const override { return static_cast<int>(origin_.size()); }
  int child_dim() const override { return 1; }
  TaskMapEval Evaluate(const Vec& q, const Vec& qd) const override;
  const Vec& origin() const { return origin_; }
  double radius() const { return radius_; }

 private:
  Vec origin_;
  double radius_;
};

enum class LimitSide { kUpper, kLower };

// Upper: x = limit - q_j. Lower: x = q_j - limit.
class JointLimitMap final : public TaskMap {
 public:
  JointLimitMap(int dim, int joint, double limit, LimitSide side);
  std::string_view kind() const override {
    return side_ == LimitSide::kUpper ? "joint_limit_upper" : "joint_limit_lower";
  }
  int parent_dim() const override { return dim_; }
  int child_dim() const override { return 1; }
  TaskMapEval Evaluate(const Vec& q, const Vec& qd) const override;

 private:
  int dim_;
  int joint_;
  double limit_;
  LimitSide side_;
};

// x = n^T (q - anchor) with unit normal n.
class PlaneSignedDistanceMap final : public TaskMap {
 public:
  PlaneSignedDistanceMap(Vec anchor, Vec normal);
  std::string_view kind() const override { return "plane_signed_distance"; }
  int parent_dim() const override { return static_cast<int>(anchor_.size()); }
  int child_dim() const override { return 1; }
  TaskMapEval Evaluate(const Vec& q, const Vec& qd) const override;

 private:
  Vec anchor_;
  Vec normal_;
};

// x = |P (q - anchor)|, P projecting out the unit line direction.
// At x = 0 the Jacobian is taken as zero.
class LineDistanceMap final : public TaskMap {
 public:
  LineDistanceMap(Vec anchor, Vec direction);
  std::string_view kind() const override { return "line_distance"; }
  int parent_dim() const override { return static_cast<int>(anchor_.size()); }
  int child_dim() const override { return 1; }
  TaskMapEval Evaluate(const Vec& q, const Vec& qd) const override;

 private:
  Vec anchor_;
  Vec direction_;
};

struct Segment {
  Vec a;
  Vec b;
};

// Distance from q to the nearest of a set of segments. The gradient is the
// unit vector from the closest point, which is held fixed when
// differentiating. Curvature is exact for the piecewise distance field.
class SegmentSetDistanceMap final : public TaskMap {
 public:
  explicit SegmentSetDistanceMap(std::vector<Segment> segments);
  std::string_view kind() const override { return "segment_distance"; }
  int parent_dim() const override { return dim_; }
  int child_dim() const override { return 1; }
  TaskMapEval Evaluate(const Vec& q, const Vec& qd) const override;

 private:
  std::vector<Segment> segments_;
  int dim_;
};

// outer(inner(q)).
class ComposedMap final : public TaskMap {
 public:
  ComposedMap(TaskMapPtr inner, TaskMapPtr outer);
  std::string_view kind() const override { return "composed"; }
  int parent_dim() const override { return inner_->parent_dim(); }
  int child_dim() const override { return outer_->child_dim(); }
  TaskMapEval Evaluate(const Vec& q, const Vec& qd) const override;

 private:
  TaskMapPtr inner_;
  TaskMapPtr outer_;
};

// Chain rule for a parent-relative evaluation `edge` evaluated at the
// parent's state, applied to the parent's root-relative `chain`.
TaskMapEval ComposeEvals(const TaskMapEval& chain, const TaskMapEval& edge);

}  // namespace fabrics

#endif  // FABRICS_TASK_MAP_H_
