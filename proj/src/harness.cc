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

#include "fabrics/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include "json.hpp"

#include "fabrics/errors.h"
#include "fabrics/plot.h"

namespace fabrics {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

Vec ToVec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

RolloutOptions OptionsFor(const BuiltSystem& built) {
  RolloutOptions options;
  if (built.arm) options.end_effector = built.path_point;
  return options;
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// JSON has no infinities; absent distances are written as null.
json Finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

bool RunResult::any_failure() const {
  return std::any_of(rollouts.begin(), rollouts.end(),
                     [](const RolloutResult& r) { return r.traj.failed(); });
}

const RolloutResult* RunResult::Find(const std::string& variant, int state) const {
  for (const RolloutResult& r : rollouts) {
    if (r.variant == variant && r.state == state) return &r;
  }
  return nullptr;
}

RunResult RunScenario(const ScenarioConfig& config, const RunOptions& options) {
  std::vector<const VariantConfig*> variants;
  for (const VariantConfig& v : config.variants) {
    if (options.only_variant.empty() || v.name == options.only_variant) variants.push_back(&v);
  }
  if (variants.empty()) {
    throw ConfigError("", 0, fmt::format("unknown variant '{}'", options.only_variant));
  }
  const std::vector<InitialState> states = config.AllInitialStates();

  std::vector<BuiltSystem> built;
  for (const VariantConfig* v : variants) built.push_back(BuildSystem(config, *v));

  struct Job {
    int variant;
    int state;
  };
  std::vector<Job> jobs;
  for (int v = 0; v < static_cast<int>(variants.size()); ++v) {
    for (int s = 0; s < static_cast<int>(states.size()); ++s) jobs.push_back({v, s});
  }

  RunResult result;
  result.rollouts.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      const BuiltSystem& b = built[job.variant];
      const InitialState& st = states[job.state];
      const auto start = std::chrono::steady_clock::now();
      RolloutResult& r = result.rollouts[i];
      r.variant = variants[job.variant]->name;
      r.state = job.state;
      r.traj = Rollout(*b.system, ToVec(st.q), ToVec(st.qd), config.integrator, OptionsFor(b));
      r.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  int threads = options.threads > 0 ? options.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return result;
}

SpeedTracking TrackSpeed(const Trajectory& traj, double desired_speed, double exec_scale,
                         double band) {
  SpeedTracking s;
  s.applicable = true;
  s.desired = desired_speed;
  s.band = band;
  const int n = traj.size();
  int entry = -1;
  int gate = n;
  for (int k = 0; k < n; ++k) {
    const double speed = std::sqrt(std::max(0.0, 2.0 * traj.exec_energy[k] / exec_scale));
    const double dev = std::abs(speed - desired_speed) / desired_speed;
    if (entry < 0 && dev <= band) entry = k;
    if (traj.traces[k].s_beta > 0.5) {
      gate = k;
      break;
    }
  }
  if (gate < n) s.gate_time = traj.times[gate];
  if (entry < 0) return s;
  s.entry_time = traj.times[entry];
  for (int k = entry; k < gate; ++k) {
    const double speed = std::sqrt(std::max(0.0, 2.0 * traj.exec_energy[k] / exec_scale));
    s.max_deviation = std::max(s.max_deviation, std::abs(speed - desired_speed) / desired_speed);
  }
  s.held = s.max_deviation <= band;
  return s;
}

PathSpace PathSpaceFor(const ScenarioConfig& config) {
  return config.robot.kind == RobotKind::kPlanarArm ? PathSpace::kEndEffector : PathSpace::kConfig;
}

RolloutMetrics ComputeRolloutMetrics(const ScenarioConfig& config, const VariantConfig& variant,
                                     const RolloutResult& rollout) {
  const Trajectory& traj = rollout.traj;
  RolloutMetrics m;
  m.variant = rollout.variant;
  m.state = rollout.state;
  m.termination = std::string(TerminationName(traj.termination));
  m.failure_step = traj.failure_step;
  m.failure_message = traj.failure_message;
  m.steps = traj.size();
  m.wall_seconds = rollout.wall_seconds;
  if (traj.size() == 0) return m;
  const ConvergenceReport report = DetectConvergence(traj, config.convergence);
  m.converged = report.converged;
  m.converged_step = report.converged_step;
  m.final_distance = report.final_distance;
  m.final_speed = report.final_speed;
  m.reached = !traj.failed() && report.final_distance <= config.convergence.pos_tol;
  m.min_barrier_distance =
      *std::min_element(traj.min_barrier_distance.begin(), traj.min_barrier_distance.end());
  m.min_obstacle_distance =
      *std::min_element(traj.min_obstacle_distance.begin(), traj.min_obstacle_distance.end());
  if (variant.controller.mode == DampingMode::kSpeedControl) {
    m.speed = TrackSpeed(traj, variant.controller.desired_speed, config.execution_energy_scale);
  }
  return m;
}

std::vector<PairMetric> CrossSpeedPairs(const ScenarioConfig& config, const RunResult& run) {
  std::vector<PairMetric> pairs;
  const PathSpace space = PathSpaceFor(config);
  const int n_states = static_cast<int>(config.AllInitialStates().size());
  const auto& vs = config.variants;
  for (std::size_t a = 0; a < vs.size(); ++a) {
    for (std::size_t b = a + 1; b < vs.size(); ++b) {
      const VariantConfig& va = vs[a];
      const VariantConfig& vb = vs[b];
      if (va.style != vb.style || va.barrier_metric != vb.barrier_metric ||
          va.controller.mode != DampingMode::kSpeedControl ||
          vb.controller.mode != DampingMode::kSpeedControl ||
          va.controller.desired_speed == vb.controller.desired_speed) {
        continue;
      }
      for (int s = 0; s < n_states; ++s) {
        const RolloutResult* ra = run.Find(va.name, s);
        const RolloutResult* rb = run.Find(vb.name, s);
        if (ra == nullptr || rb == nullptr || ra->traj.size() == 0 || rb->traj.size() == 0) {
          continue;
        }
        PairMetric p;
        p.style = std::string(StyleName(va.style));
        p.barrier_metric = std::string(BarrierMetricName(va.barrier_metric));
        p.variant_a = va.name;
        p.variant_b = vb.name;
        p.state = s;
        p.l_ab = PathDifference(ra->traj, rb->traj, space);
        p.l_ba = PathDifference(rb->traj, ra->traj, space);
        pairs.push_back(p);
      }
    }
  }
  return pairs;
}

std::vector<StyleSummary> CompareVariants(const ScenarioConfig& config,
                                          const std::vector<RolloutMetrics>& rollouts,
                                          const std::vector<PairMetric>& pairs) {
  std::map<std::string, FabricStyle> style_of;
  for (const VariantConfig& v : config.variants) style_of[v.name] = v.style;
  std::vector<StyleSummary> out;
  for (FabricStyle style : {FabricStyle::kGeometric, FabricStyle::kLagrangian}) {
    StyleSummary s;
    s.style = std::string(StyleName(style));
    std::vector<double> distances;
    for (const RolloutMetrics& m : rollouts) {
      if (style_of.at(m.variant) != style) continue;
      ++s.rollouts;
      s.converged += m.converged ? 1 : 0;
      s.reached += m.reached ? 1 : 0;
      s.failures += (m.termination == "barrier_violation" || m.termination == "divergence");
      distances.push_back(m.final_distance);
    }
    if (s.rollouts == 0) continue;
    s.mean_final_distance = Mean(distances);
    std::vector<double> ls;
    for (const PairMetric& p : pairs) {
      if (p.style != s.style) continue;
      ++s.pair_count;
      ls.push_back(p.l_ab);
      ls.push_back(p.l_ba);
    }
    s.mean_cross_speed_l = Mean(ls);
    out.push_back(s);
  }
  return out;
}

MetricsReport ComputeMetrics(const ScenarioConfig& config, const RunResult& run) {
  MetricsReport report;
  report.scenario = config.name;
  report.path_space = PathSpaceFor(config) == PathSpace::kConfig ? "config" : "end_effector";
  for (const RolloutResult& r : run.rollouts) {
    report.rollouts.push_back(ComputeRolloutMetrics(config, *config.FindVariant(r.variant), r));
  }
  report.pairs = CrossSpeedPairs(config, run);
  report.styles = CompareVariants(config, report.rollouts, report.pairs);
  return report;
}

const RolloutMetrics* MetricsReport::Find(const std::string& variant, int state) const {
  for (const RolloutMetrics& m : rollouts) {
    if (m.variant == variant && m.state == state) return &m;
  }
  return nullptr;
}

const StyleSummary* MetricsReport::Style(const std::string& style) const {
  for (const StyleSummary& s : styles) {
    if (s.style == style) return &s;
  }
  return nullptr;
}

std::string MetricsJson(const MetricsReport& report) {
  json doc;
  doc["scenario"] = report.scenario;
  doc["path_space"] = report.path_space;
  json rollouts = json::array();
  for (const RolloutMetrics& m : report.rollouts) {
    json r;
    r["variant"] = m.variant;
    r["state"] = m.state;
    r["termination"] = m.termination;
    r["failure_step"] = m.failure_step;
    r["failure_message"] = m.failure_message;
    r["steps"] = m.steps;
    r["converged"] = m.converged;
    r["converged_step"] = m.converged_step;
    r["reached"] = m.reached;
    r["final_distance"] = m.final_distance;
    r["final_speed"] = m.final_speed;
    r["min_barrier_distance"] = Finite(m.min_barrier_distance);
    r["min_obstacle_distance"] = Finite(m.min_obstacle_distance);
    r["wall_seconds"] = m.wall_seconds ? json(*m.wall_seconds) : json(nullptr);
    if (m.speed.applicable) {
      r["speed_tracking"] = {{"desired", m.speed.desired},
                             {"band", m.speed.band},
                             {"entry_time", m.speed.entry_time},
                             {"gate_time", m.speed.gate_time},
                             {"held", m.speed.held},
                             {"max_deviation", m.speed.max_deviation}};
    }
    rollouts.push_back(r);
  }
  doc["rollouts"] = rollouts;
  json pairs = json::array();
  for (const PairMetric& p : report.pairs) {
    pairs.push_back({{"style", p.style},
                     {"barrier_metric", p.barrier_metric},
                     {"variant_a", p.variant_a},
                     {"variant_b", p.variant_b},
                     {"state", p.state},
                     {"L_ab", p.l_ab},
                     {"L_ba", p.l_ba}});
  }
  doc["pairs"] = pairs;
  json styles = json::array();
  for (const StyleSummary& s : report.styles) {
    styles.push_back({{"style", s.style},
                      {"rollouts", s.rollouts},
                      {"converged", s.converged},
                      {"reached", s.reached},
                      {"failures", s.failures},
                      {"mean_final_distance", s.mean_final_distance},
                      {"pair_count", s.pair_count},
                      {"mean_cross_speed_L", s.mean_cross_speed_l}});
  }
  doc["comparison"] = styles;
  return doc.dump(2) + "\n";
}

std::string RolloutStem(const std::string& variant, int state) {
  return fmt::format("{}/state_{:02d}", variant, state);
}

void WriteRunDirectory(const std::string& dir, const ScenarioConfig& config, const RunResult& run,
                       const MetricsReport& report) {
  const fs::path root(dir);
  fs::create_directories(root);
  WriteFile(root / "config.yaml", EchoScenario(config));
  WriteFile(root / "metrics.json", MetricsJson(report));

  std::map<std::string, std::vector<SvgPath>> svg_paths;
  for (const RolloutResult& r : run.rollouts) {
    const fs::path stem = root / RolloutStem(r.variant, r.state);
    fs::create_directories(stem.parent_path());
    if (config.outputs.csv) {
      std::ofstream csv(stem.string() + ".csv", std::ios::binary);
      WriteCsv(r.traj, csv);
    }
    json status = {{"termination", std::string(TerminationName(r.traj.termination))},
                   {"failure_step", r.traj.failure_step},
                   {"failure_message", r.traj.failure_message},
                   {"wall_seconds", r.wall_seconds}};
    WriteFile(stem.string() + ".json", status.dump(2) + "\n");
    if (config.outputs.dat) {
      std::ofstream path(stem.string() + "_path.dat", std::ios::binary);
      WritePathDat(r.traj, path);
      std::ofstream speed(stem.string() + "_speed.dat", std::ios::binary);
      WriteSpeedDat(r.traj, config.execution_energy_scale, speed);
    }
    auto& paths = svg_paths[r.variant];
    paths.push_back({PlanarPath(r.traj), kColors[paths.size() % std::size(kColors)]});
  }
  if (config.outputs.svg) {
    for (const auto& [variant, paths] : svg_paths) {
      const BuiltSystem scene = BuildSystem(config, *config.FindVariant(variant));
      WriteFile(root / fmt::format("paths_{}.svg", variant),
                RenderPathsSvg(scene, paths, fmt::format("{} / {}", config.name, variant)));
    }
  }
}

Trajectory ReadCsv(std::istream& in, const BuiltSystem& built, double dt) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidValueError("empty trajectory CSV");
  std::map<std::string, int> col;
  {
    std::stringstream header(line);
    std::string name;
    for (int i = 0; std::getline(header, name, ','); ++i) col[name] = i;
  }
  auto index = [&](const std::string& name) {
    const auto it = col.find(name);
    if (it == col.end()) throw InvalidValueError("trajectory CSV lacks column " + name);
    return it->second;
  };
  const int n = built.system->dim();
  Trajectory traj;
  traj.dt = dt;
  std::vector<double> row;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    row.clear();
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      row.push_back(std::strtod(p, &end));
      if (*end != ',') break;
      p = end + 1;
    }
    if (row.size() != col.size()) throw InvalidValueError("ragged trajectory CSV row");
    Vec q(n), qd(n), qdd(n);
    for (int i = 0; i < n; ++i) {
      q[i] = row[index(fmt::format("q{}", i))];
      qd[i] = row[index(fmt::format("qd{}", i))];
      qdd[i] = row[index(fmt::format("qdd{}", i))];
    }
    traj.times.push_back(row[index("t")]);
    traj.q.push_back(q);
    traj.qd.push_back(qd);
    traj.qdd.push_back(qdd);
    if (col.count("ee_x")) traj.ee.emplace_back(row[index("ee_x")], row[index("ee_y")]);
    traj.fabric_energy.push_back(row[index("L_e")]);
    traj.exec_energy.push_back(row[index("L_ex")]);
    traj.hamiltonian.push_back(row[index("H_total")]);
    RegulatorTrace t;
    t.s_beta = row[index("s_beta")];
    t.eta = row[index("eta")];
    t.beta_reg = row[index("beta_reg")];
    t.alpha_reg = row[index("alpha_reg")];
    t.alpha_boost = row[index("alpha_boost")];
    traj.traces.push_back(t);
    traj.goal_distance.push_back(built.system->GoalOffset(q).norm());
    const RootResolution res = built.tree->Evaluate(q, qd, false);
    traj.min_barrier_distance.push_back(res.min_barrier_distance);
    traj.min_obstacle_distance.push_back(res.min_obstacle_distance);
  }
  return traj;
}

MetricsReport RecomputeMetrics(const std::string& dir) {
  const fs::path root(dir);
  const ScenarioConfig config = LoadScenario((root / "config.yaml").string());
  const int n_states = static_cast<int>(config.AllInitialStates().size());
  RunResult run;
  for (const VariantConfig& v : config.variants) {
    const fs::path first = root / (RolloutStem(v.name, 0) + ".csv");
    if (!fs::exists(first)) continue;  // variant not part of this run
    const BuiltSystem built = BuildSystem(config, v);
    for (int s = 0; s < n_states; ++s) {
      const std::string stem = (root / RolloutStem(v.name, s)).string();
      std::ifstream csv(stem + ".csv");
      if (!csv) throw InvalidValueError("missing trajectory " + stem + ".csv");
      RolloutResult r;
      r.variant = v.name;
      r.state = s;
      r.traj = ReadCsv(csv, built, config.integrator.dt);
      std::ifstream status_file(stem + ".json");
      if (status_file) {
        const json status = json::parse(status_file);
        const std::string term = status.at("termination").get<std::string>();
        for (Termination t : {Termination::kDurationReached, Termination::kConverged,
                              Termination::kBarrierViolation, Termination::kDivergence}) {
          if (TerminationName(t) == term) r.traj.termination = t;
        }
        r.traj.failure_step = status.at("failure_step").get<int>();
        r.traj.failure_message = status.at("failure_message").get<std::string>();
        r.wall_seconds = status.at("wall_seconds").get<double>();
      }
      run.rollouts.push_back(std::move(r));
    }
  }
  if (run.rollouts.empty()) throw InvalidValueError("run directory holds no trajectories");
  return ComputeMetrics(config, run);
}

}  // namespace fabrics
