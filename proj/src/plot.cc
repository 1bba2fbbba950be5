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

#include "fabrics/plot.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

#include <fmt/format.h>

namespace fabrics {

std::vector<Eigen::Vector2d> PlanarPath(const Trajectory& traj) {
  if (!traj.ee.empty()) return traj.ee;
  std::vector<Eigen::Vector2d> out;
  out.reserve(traj.q.size());
  for (const Vec& q : traj.q) out.emplace_back(q[0], q.size() > 1 ? q[1] : 0.0);
  return out;
}

void WritePathDat(const Trajectory& traj, std::ostream& out) {
  fmt::memory_buffer buf;
  auto it = std::back_inserter(buf);
  fmt::format_to(it, "# x y\n");
  for (const auto& p : PlanarPath(traj)) fmt::format_to(it, "{:.17g} {:.17g}\n", p.x(), p.y());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void WriteSpeedDat(const Trajectory& traj, double exec_scale, std::ostream& out) {
  fmt::memory_buffer buf;
  auto it = std::back_inserter(buf);
  fmt::format_to(it, "# t speed s_beta eta\n");
  for (int k = 0; k < traj.size(); ++k) {
    const double speed = std::sqrt(std::max(0.0, 2.0 * traj.exec_energy[k] / exec_scale));
    fmt::format_to(it, "{:.17g} {:.17g} {:.17g} {:.17g}\n", traj.times[k], speed,
                   traj.traces[k].s_beta, traj.traces[k].eta);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::string RenderPathsSvg(const BuiltSystem& scene, const std::vector<SvgPath>& paths,
                           const std::string& title) {
  constexpr double kSize = 600.0;
  constexpr double kMargin = 30.0;
  double lo_x = std::numeric_limits<double>::infinity();
  double lo_y = lo_x;
  double hi_x = -lo_x;
  double hi_y = -lo_x;
  auto grow = [&](const Eigen::Vector2d& p, double r = 0.0) {
    lo_x = std::min(lo_x, p.x() - r);
    hi_x = std::max(hi_x, p.x() + r);
    lo_y = std::min(lo_y, p.y() - r);
    hi_y = std::max(hi_y, p.y() + r);
  };
  for (const auto& path : paths) {
    for (const auto& p : path.points) grow(p);
  }
  for (const Circle& c : scene.circles) grow(c.center, c.radius);
  for (const Segment& s : scene.walls) {
    grow(s.a.head<2>());
    grow(s.b.head<2>());
  }
  grow(scene.target);
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
  const double scale = (kSize - 2.0 * kMargin) / span;
  auto sx = [&](double x) { return kMargin + (x - lo_x) * scale; };
  auto sy = [&](double y) { return kSize - kMargin - (y - lo_y) * scale; };

  fmt::memory_buffer buf;
  auto it = std::back_inserter(buf);
  fmt::format_to(it,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" "
                 "viewBox=\"0 0 {0} {0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
                 "<text x=\"10\" y=\"20\" font-family=\"monospace\" font-size=\"14\">{1}</text>\n",
                 kSize, title);
  for (const Circle& c : scene.circles) {
    fmt::format_to(it,
                   "<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"{:.3f}\" fill=\"#ccc\" "
                   "stroke=\"#555\"/>\n",
                   sx(c.center.x()), sy(c.center.y()), c.radius * scale);
  }
  for (const Segment& s : scene.walls) {
    fmt::format_to(it,
                   "<line x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\" stroke=\"#333\" "
                   "stroke-width=\"3\"/>\n",
                   sx(s.a[0]), sy(s.a[1]), sx(s.b[0]), sy(s.b[1]));
  }
  for (const auto& path : paths) {
    if (path.points.empty()) continue;
    fmt::format_to(it, "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"",
                   path.color);
    // Thin long paths so the file stays small.
    const std::size_t stride = std::max<std::size_t>(1, path.points.size() / 2000);
    for (std::size_t i = 0; i < path.points.size(); i += stride) {
      fmt::format_to(it, "{:.2f},{:.2f} ", sx(path.points[i].x()), sy(path.points[i].y()));
    }
    fmt::format_to(it, "{:.2f},{:.2f}\"/>\n", sx(path.points.back().x()),
                   sy(path.points.back().y()));
  }
  fmt::format_to(it,
                 "<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"5\" fill=\"green\"/>\n</svg>\n",
                 sx(scene.target.x()), sy(scene.target.y()));
  return fmt::to_string(buf);
}

}  // namespace fabrics
