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

// Plot-ready data files and a small SVG renderer for path overlays.

#ifndef FABRICS_PLOT_H_
#define FABRICS_PLOT_H_

#include <ostream>
#include <string>
#include <vector>

#include "fabrics/builder.h"

namespace fabrics {

// Planar path of a trajectory: recorded end-effector positions, else q[0:2].
std::vector<Eigen::Vector2d> PlanarPath(const Trajectory& traj);

// "x y" per row.
void WritePathDat(const Trajectory& traj, std::ostream& out);
// "t speed s_beta eta" per row, speed = sqrt(2 L_ex / scale).
void WriteSpeedDat(const Trajectory& traj, double exec_scale, std::ostream& out);

struct SvgPath {
  std::vector<Eigen::Vector2d> points;
  std::string color;
};

// Paths over the scene's obstacles, walls and target.
std::string RenderPathsSvg(const BuiltSystem& scene, const std::vector<SvgPath>& paths,
                           const std::string& title);

}  // namespace fabrics

#endif  // FABRICS_PLOT_H_
