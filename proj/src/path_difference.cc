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

#include "fabrics/path_difference.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fabrics/errors.h"

namespace fabrics {

double NearestDistance(const Vec& p, const std::vector<Vec>& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& s : q) best = std::min(best, (s - p).squaredNorm());
  return std::sqrt(best);
}

double PathDifference(const SampledPath& p, const std::vector<Vec>& q) {
  if (p.points.empty() || q.empty()) throw InvalidValueError("path difference of an empty path");
  if (p.speeds.size() != p.points.size()) {
    throw DimensionError("path points and speeds differ in length");
  }
  double weighted = 0.0;
  double length = 0.0;
  double worst = 0.0;
  for (std::size_t t = 0; t < p.points.size(); ++t) {
    const double c = NearestDistance(p.points[t], q);
    const double ds = p.speeds[t] * p.dt;
    weighted += c * ds;
    length += ds;
    worst = std::max(worst, c);
  }
  if (length <= 0.0) return worst;
  return weighted / length;
}

SampledPath PathOf(const Trajectory& traj, PathSpace space) {
  SampledPath path;
  path.dt = traj.dt;
  const int n = traj.size();
  if (space == PathSpace::kConfig) {
    path.points = traj.q;
    for (const Vec& qd : traj.qd) path.speeds.push_back(qd.norm());
    return path;
  }
  if (static_cast<int>(traj.ee.size()) != n) {
    throw InvalidValueError("end-effector path needs recorded end-effector positions");
  }
  for (const auto& e : traj.ee) path.points.push_back(Vec(e));
  for (int k = 0; k < n; ++k) {
    if (n < 2) {
      path.speeds.push_back(0.0);
      continue;
    }
    const int a = std::max(0, k - 1);
    const int b = std::min(n - 1, k + 1);
    path.speeds.push_back((traj.ee[b] - traj.ee[a]).norm() / ((b - a) * traj.dt));
  }
  return path;
}

double PathDifference(const Trajectory& p, const Trajectory& q, PathSpace space) {
  return PathDifference(PathOf(p, space), PathOf(q, space).points);
}

}  // namespace fabrics
