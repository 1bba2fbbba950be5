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

// Average distance of one path from another, weighted by arc length:
//   L(P, Q) = sum_t c(p_t, Q) |pdot_t| dt / sum_t |pdot_t| dt,
// with c(p, Q) the distance from p to the nearest sample of Q. Not
// symmetric in P and Q.

#ifndef FABRICS_PATH_DIFFERENCE_H_
#define FABRICS_PATH_DIFFERENCE_H_

#include <vector>

#include "fabrics/runtime.h"

namespace fabrics {

enum class PathSpace { kConfig, kEndEffector };

struct SampledPath {
  std::vector<Vec> points;
  std::vector<double> speeds;  // |pdot| at each sample
  double dt = 0.0;
};

// Distance from p to the nearest sample of q.
double NearestDistance(const Vec& p, const std::vector<Vec>& q);

// When P has zero arc length the result is max_t c(p_t, Q).
double PathDifference(const SampledPath& p, const std::vector<Vec>& q);

// Configuration space uses the recorded q and |qd|. End-effector space needs
// a trajectory recorded with an end-effector function; speeds come from
// central differences of the recorded positions.
SampledPath PathOf(const Trajectory& traj, PathSpace space);

double PathDifference(const Trajectory& p, const Trajectory& q, PathSpace space);

}  // namespace fabrics

#endif  // FABRICS_PATH_DIFFERENCE_H_
