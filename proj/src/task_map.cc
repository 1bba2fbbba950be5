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

#include "fabrics/task_map.h"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fabrics/errors.h"

namespace fabrics {
namespace {

TaskMapEval Scalar(double x, Vec row, double curvature) {
  TaskMapEval e;
  e.x = Vec::Constant(1, x);
  e.jacobian = row.transpose();
  e.curvature = Vec::Constant(1, curvature);
  return e;
}

// |r| for r moving with velocity r_dot: J = r^T/|r| and
// Jdot qd = (|r_dot|^2 - (u . r_dot)^2)/|r|.
TaskMapEval NormOf(const Vec& r, const Vec& r_dot) {
  const double d = r.norm();
  if (d == 0.0) return Scalar(0.0, Vec::Zero(r.size()), 0.0);
  const Vec u = r / d;
  const double radial = u.dot(r_dot);
  return Scalar(d, u, (r_dot.squaredNorm() - radial * radial) / d);
}

}  // namespace

void TaskMap::CheckInput(const Vec& q, const Vec& qd) const {
  if (q.size() != parent_dim() || qd.size() != parent_dim()) {
    throw DimensionError(fmt::format("{} map expects dim {}, got {}/{}", kind(),
                                     parent_dim(), q.size(), qd.size()));
  }
}

TaskMapEval IdentityMap::Evaluate(const Vec& q, const Vec& qd) const {
  CheckInput(q, qd);
  return TaskMapEval{q, Mat::Identity(dim_, dim_), Vec::Zero(dim_)};
}

TaskMapEval OffsetMap::Evaluate(const Vec& q, const Vec& qd) const {
  CheckInput(q, qd);
  const int n = parent_dim();
  return TaskMapEval{q - target_, Mat::Identity(n, n), Vec::Zero(n)};
}

CircleDistanceMap::CircleDistanceMap(Vec origin, double radius)
    : origin_(std::move(origin)), radius_(radius) {
  if (!(radius_ > 0.0)) throw InvalidValueError("circle radius must be > 0");
}

TaskMapEval CircleDistanceMap::Evaluate(const Vec& q, const Vec& qd) const {
  CheckInput(q, qd);
  TaskMapEval e = NormOf(q - origin_, qd);
  e.x[0] = e.x[0] / radius_ - 1.0;
  e.jacobian /= radius_;
  e.curvature /= radius_;
  return e;
}

JointLimitMap::JointLimitMap(int dim, int joint, double limit, LimitSide side)
    : dim_(dim), joint_(joint), limit_(limit), side_(side) {
  if (joint < 0 || joint >= dim) {
    throw DimensionError(fmt::format("joint index {} out of range for dim {}", joint, dim));
  }
}

TaskMapEval JointLimitMap::Evaluate(const Vec& q, const Vec& qd) const {
  CheckInput(q, qd);
  Vec row = Vec::Zero(dim_);
  if (side_ == LimitSide::kUpper) {
    row[joint_] = -1.0;
    return Scalar(limit_ - q[joint_], row, 0.0);
  }
  row[joint_] = 1.0;
  return Scalar(q[joint_] - limit_, row, 0.0);
}

PlaneSignedDistanceMap::PlaneSignedDistanceMap(Vec anchor, Vec normal)
    : anchor_(std::move(anchor)), normal_(std::move(normal)) {
  if (anchor_.size() != normal_.size()) throw DimensionError("plane anchor/normal dims");
  const double n = normal_.norm();
  if (!(n > 0.0)) throw InvalidValueError("plane normal must be nonzero");
  normal_ /= n;
}

TaskMapEval PlaneSignedDistanceMap::Evaluate(const Vec& q, const Vec& qd) const {
  CheckInput(q, qd);
  return Scalar(normal_.dot(q - anchor_), normal_, 0.0);
}

LineDistanceMap::LineDistanceMap(Vec anchor, Vec direction)
    : anchor_(std::move(anchor)), direction_(std::move(direction)) {
  if (anchor_.size() != direction_.size()) throw DimensionError("line anchor/direction dims");
  const double n = direction_.norm();
  if (!(n > 0.0)) throw InvalidValueError("line direction must be nonzero");
  direction_ /= n;
}

TaskMapEval LineDistanceMap::Evaluate(const Vec& q, const Vec& qd) const {
  CheckInput(q, qd);
  const Vec r = q - anchor_;
  const Vec perp = r - direction_ * direction_.dot(r);
  const Vec perp_dot = qd - direction_ * direction_.dot(qd);
  return NormOf(perp, perp_dot);
}

SegmentSetDistanceMap::SegmentSetDistanceMap(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw InvalidValueError("segment set is empty");
  dim_ = static_cast<int>(segments_.front().a.size());
  for (const Segment& s : segments_) {
    if (s.a.size() != dim_ || s.b.size() != dim_) throw DimensionError("segment dims differ");
  }
}

TaskMapEval SegmentSetDistanceMap::Evaluate(const Vec& q, const Vec& qd) const {
  CheckInput(q, qd);
  double best = std::numeric_limits<double>::infinity();
  TaskMapEval result;
  for (const Segment& s : segments_) {
    const Vec ab = s.b - s.a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? (q - s.a).dot(ab) / len2 : 0.0;
    TaskMapEval e;
    if (t > 0.0 && t < 1.0) {
      // Interior: distance to the supporting line.
      const Vec u = ab / std::sqrt(len2);
      const Vec r = q - s.a;
      e = NormOf(r - u * u.dot(r), qd - u * u.dot(qd));
    } else {
      e = NormOf(q - (t <= 0.0 ? s.a : s.b), qd);
    }
    if (e.x[0] < best) {
      best = e.x[0];
      result = std::move(e);
    }
  }
  return result;
}

ComposedMap::ComposedMap(TaskMapPtr inner, TaskMapPtr outer)
    : inner_(std::move(inner)), outer_(std::move(outer)) {
  if (inner_->child_dim() != outer_->parent_dim()) {
    throw DimensionError(fmt::format("cannot compose {} (out {}) with {} (in {})",
                                     inner_->kind(), inner_->child_dim(), outer_->kind(),
                                     outer_->parent_dim()));
  }
}

TaskMapEval ComposedMap::Evaluate(const Vec& q, const Vec& qd) const {
  CheckInput(q, qd);
  const TaskMapEval in = inner_->Evaluate(q, qd);
  const TaskMapEval out = outer_->Evaluate(in.x, in.jacobian * qd);
  return ComposeEvals(in, out);
}

TaskMapEval ComposeEvals(const TaskMapEval& chain, const TaskMapEval& edge) {
  if (edge.parent_dim() != chain.child_dim()) {
    throw DimensionError("composition dims do not chain");
  }
  return TaskMapEval{edge.x, edge.jacobian * chain.jacobian,
                     edge.jacobian * chain.curvature + edge.curvature};
}

}  // namespace fabrics
