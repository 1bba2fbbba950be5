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

#include "fabrics/kinematics.h"

#include <cmath>

#include <fmt/format.h>

#include "fabrics/errors.h"

namespace fabrics {

PlanarArm::PlanarArm(std::vector<double> link_lengths, BasePose base)
    : link_lengths_(std::move(link_lengths)), base_(base) {
  if (link_lengths_.empty()) throw InvalidValueError("planar arm needs at least one link");
  for (double l : link_lengths_) {
    if (!(l > 0.0)) throw InvalidValueError("link lengths must be > 0");
  }
}

void PlanarArm::CheckPoint(const Vec& q, BodyPoint point) const {
  if (q.size() != n_joints()) {
    throw DimensionError(fmt::format("arm has {} joints, got q of size {}", n_joints(), q.size()));
  }
  if (point.link < 0 || point.link >= n_joints()) {
    throw DimensionError(fmt::format("body point on link {} of a {}-link arm", point.link,
                                     n_joints()));
  }
}

Eigen::Vector2d PlanarArm::Fk(const Vec& q, BodyPoint point) const {
  CheckPoint(q, point);
  Eigen::Vector2d p(base_.x, base_.y);
  double angle = base_.theta;
  for (int j = 0; j <= point.link; ++j) {
    angle += q[j];
    const double w = (j == point.link ? point.offset : 1.0) * link_lengths_[j];
    p += w * Eigen::Vector2d(std::cos(angle), std::sin(angle));
  }
  return p;
}

TaskMapEval PlanarArm::Jacobian(const Vec& q, const Vec& qd, BodyPoint point) const {
  CheckPoint(q, point);
  if (qd.size() != q.size()) throw DimensionError("arm velocity size mismatch");
  const int n = n_joints();
  TaskMapEval e;
  e.x = Vec::Zero(2);
  e.jacobian = Mat::Zero(2, n);
  e.curvature = Vec::Zero(2);
  e.x << base_.x, base_.y;

  double angle = base_.theta;
  double omega = 0.0;
  for (int j = 0; j <= point.link; ++j) {
    angle += q[j];
    omega += qd[j];
    const double w = (j == point.link ? point.offset : 1.0) * link_lengths_[j];
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    e.x[0] += w * c;
    e.x[1] += w * s;
    // Link vector j depends on joints 0..j through its absolute angle.
    for (int k = 0; k <= j; ++k) {
      e.jacobian(0, k) += -w * s;
      e.jacobian(1, k) += w * c;
    }
    e.curvature[0] += -w * c * omega * omega;
    e.curvature[1] += -w * s * omega * omega;
  }
  return e;
}

std::vector<BodyPoint> PlanarArm::DefaultCollisionPoints() const {
  std::vector<BodyPoint> points;
  for (int j = 0; j < n_joints(); ++j) {
    points.push_back({j, 0.5});
    points.push_back({j, 1.0});
  }
  return points;
}

}  // namespace fabrics
