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

// Scenario runner: fans rollouts out over threads, computes metrics, and
// reads and writes run directories.

#ifndef FABRICS_HARNESS_H_
#define FABRICS_HARNESS_H_

#include <optional>
#include <string>
#include <vector>

#include "fabrics/builder.h"
#include "fabrics/path_difference.h"
#include "fabrics/scenario.h"

namespace fabrics {

struct RolloutResult {
  std::string variant;
  int state = 0;
  Trajectory traj;
  double wall_seconds = 0.0;
};

struct RunOptions {
  int threads = 0;           // 0: hardware concurrency
  std::string only_variant;  // empty: all variants
};

struct RunResult {
  std::vector<RolloutResult> rollouts;  // variant-major, then state order

  bool any_failure() const;
  const RolloutResult* Find(const std::string& variant, int state) const;
};

RunResult RunScenario(const ScenarioConfig& config, const RunOptions& options = {});

// Speed tracking against the variant's desired speed, for speed control.
struct SpeedTracking {
  bool applicable = false;
  double desired = 0.0;
  double band = 0.05;         // relative
  double entry_time = -1.0;   // first time inside the band
  double gate_time = -1.0;    // first time s_beta exceeds 1/2
  bool held = false;          // inside the band from entry until gate_time
  double max_deviation = 0.0; // relative, over [entry, gate)
};

SpeedTracking TrackSpeed(const Trajectory& traj, double desired_speed, double exec_scale,
                         double band = 0.05);

struct RolloutMetrics {
  std::string variant;
  int state = 0;
  std::string termination;
  int failure_step = -1;
  std::string failure_message;
  int steps = 0;
  bool converged = false;
  int converged_step = -1;
  bool reached = false;  // final goal distance within pos_tol
  double final_distance = 0.0;
  double final_speed = 0.0;
  double min_barrier_distance = 0.0;
  double min_obstacle_distance = 0.0;
  std::optional<double> wall_seconds;
  SpeedTracking speed;
};

// Path difference between two variants that differ only in desired speed.
struct PairMetric {
  std::string style;
  std::string barrier_metric;
  std::string variant_a;
  std::string variant_b;
  int state = 0;
  double l_ab = 0.0;
  double l_ba = 0.0;
};

struct StyleSummary {
  std::string style;
  int rollouts = 0;
  int converged = 0;
  int reached = 0;
  int failures = 0;
  double mean_final_distance = 0.0;
  int pair_count = 0;
  double mean_cross_speed_l = 0.0;  // over both directions of every pair
};

struct MetricsReport {
  std::string scenario;
  std::string path_space;
  std::vector<RolloutMetrics> rollouts;
  std::vector<PairMetric> pairs;
  std::vector<StyleSummary> styles;

  const RolloutMetrics* Find(const std::string& variant, int state) const;
  const StyleSummary* Style(const std::string& style) const;
};

PathSpace PathSpaceFor(const ScenarioConfig& config);

RolloutMetrics ComputeRolloutMetrics(const ScenarioConfig& config, const VariantConfig& variant,
                                     const RolloutResult& rollout);
std::vector<PairMetric> CrossSpeedPairs(const ScenarioConfig& config, const RunResult& run);
std::vector<StyleSummary> CompareVariants(const ScenarioConfig& config,
                                          const std::vector<RolloutMetrics>& rollouts,
                                          const std::vector<PairMetric>& pairs);
MetricsReport ComputeMetrics(const ScenarioConfig& config, const RunResult& run);

std::string MetricsJson(const MetricsReport& report);

// Run directory layout:
//   config.yaml, metrics.json, paths_<variant>.svg,
//   <variant>/state_<k>.csv, .json (termination), _path.dat, _speed.dat
void WriteRunDirectory(const std::string& dir, const ScenarioConfig& config, const RunResult& run,
                       const MetricsReport& report);

std::string RolloutStem(const std::string& variant, int state);

// Rebuilds trajectories from a run directory's CSVs and recomputes metrics.
MetricsReport RecomputeMetrics(const std::string& dir);

// Parses a CSV written by WriteCsv. Derived series (goal distance, barrier
// distances) are refilled from `built`.
Trajectory ReadCsv(std::istream& in, const BuiltSystem& built, double dt);

}  // namespace fabrics

#endif  // FABRICS_HARNESS_H_
