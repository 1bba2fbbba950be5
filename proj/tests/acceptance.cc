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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "fabrics/builder.h"
#include "fabrics/errors.h"
#include "fabrics/harness.h"
#include "fabrics/path_difference.h"
#include "fabrics/scenario.h"
#include "oracle.h"

namespace fabrics {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Scenario runs are shared between criteria.
class Runs {
 public:
  explicit Runs(std::string dir) : dir_(std::move(dir)) {}

  const ScenarioConfig& Config(const std::string& name) {
    auto it = configs_.find(name);
    if (it == configs_.end()) {
      it = configs_.emplace(name, LoadScenario(dir_ + "/" + name + ".yaml")).first;
    }
    return it->second;
  }

  const RunResult& Run(const std::string& name) {
    auto it = runs_.find(name);
    if (it == runs_.end()) {
      const auto start = Clock::now();
      it = runs_.emplace(name, RunScenario(Config(name))).first;
      seconds_[name] = Seconds(start);
    }
    return it->second;
  }

  double RunSeconds(const std::string& name) {
    Run(name);
    return seconds_[name];
  }

  const std::map<std::string, RunResult>& all() const { return runs_; }

 private:
  std::string dir_;
  std::map<std::string, ScenarioConfig> configs_;
  std::map<std::string, RunResult> runs_;
  std::map<std::string, double> seconds_;
};

const std::vector<std::string>& ShippedScenarios() {
  static const std::vector<std::string> names = {
      "particle_grid", "speed_vs_damping", "energy_conservation", "planar_exp1",
      "planar_exp2",        "planar_exp3",      "random_forced_damped", "cubby_demo"};
  return names;
}

// Random root state inside every barrier domain of the built system.
std::pair<Vec, Vec> SampleRootState(const ScenarioConfig& c, const BuiltSystem& b, Sampler& s) {
  const int n = c.dim();
  for (;;) {
    Vec q(n);
    for (int i = 0; i < n; ++i) {
      if (c.robot.kind == RobotKind::kPlanarArm) {
        q[i] = s.Uniform(c.robot.lower[i] + 0.05, c.robot.upper[i] - 0.05);
      } else {
        q[i] = s.Uniform(-4.0, 4.0);
      }
    }
    const Vec qd = s.UniformVec(n, -2.0, 2.0);
    try {
      b.tree->Evaluate(q, qd);
      return {q, qd};
    } catch (const BarrierDomainError&) {
    }
  }
}

// 1. Every geometric term and every assembled root geometric policy is HD2.
Outcome Hd2Suite(Runs& runs) {
  const auto start = Clock::now();
  Sampler s(101);
  double worst = 0.0;
  int terms = 0, roots = 0, samples = 0;
  for (const auto& e : oracle::TermCatalog(PolicyKind::kGeometricHd2)) {
    if (e.term->role() != TermRole::kGeometric) continue;
    ++terms;
    for (int i = 0; i < 100; ++i, ++samples) {
      const Vec x = e.sample_x(s);
      const Vec xd = s.UniformVec(e.term->dim(), -2.0, 2.0);
      worst = std::max(worst, oracle::Hd2Error([&](const Vec& p, const Vec& v) {
        return e.term->Policy(p, v);
      }, x, xd, oracle::Hd2Scales()));
    }
  }
  for (const std::string& name : ShippedScenarios()) {
    const ScenarioConfig& c = runs.Config(name);
    for (const VariantConfig& v : c.variants) {
      if (v.style != FabricStyle::kGeometric) continue;
      const BuiltSystem b = BuildSystem(c, v);
      ++roots;
      auto pi0 = [&](const Vec& q, const Vec& qd) {
        return ResolveRoot(b.tree->Evaluate(q, qd)).pi0;
      };
      for (int i = 0; i < 100; ++i, ++samples) {
        const auto [q, qd] = SampleRootState(c, b, s);
        worst = std::max(worst, oracle::Hd2Error(pi0, q, qd, oracle::Hd2Scales()));
      }
    }
  }
  const double secs = Seconds(start);
  Outcome o;
  o.pass = worst <= 1e-9 && secs < 10.0;
  o.detail = fmt::format("{} terms, {} root policies, {} states, worst {:.2e}, {:.2f} s", terms,
                         roots, samples, worst, secs);
  return o;
}

// 2. The unforced energized geometry conserves L_e.
Outcome EnergyConservation(Runs& runs) {
  const RunResult& run = runs.Run("energy_conservation");
  double worst = 0.0;
  int count = 0;
  bool failed = false;
  for (const RolloutResult& r : run.rollouts) {
    const Trajectory& t = r.traj;
    failed |= t.failed();
    const double l0 = t.fabric_energy.front();
    for (double l : t.fabric_energy) worst = std::max(worst, std::abs(l - l0) / l0);
    ++count;
  }
  Outcome o;
  o.pass = !failed && count >= 14 && worst <= 1e-4;
  o.detail = fmt::format("{} rollouts, worst relative drift {:.2e}{}", count, worst,
                         failed ? ", rollout failure" : "");
  return o;
}

// 3. Zero work of the energy-preserving forcing and the dissipation identity.
Outcome Dissipation(Runs& runs) {
  double worst_zero = 0.0;
  int steps = 0;
  for (const std::string& name :
       {"random_forced_damped", "speed_vs_damping", "particle_grid"}) {
    for (const RolloutResult& r : runs.Run(name).rollouts) {
      const Trajectory& t = r.traj;
      for (int k = 0; k < t.size(); ++k, ++steps) {
        const double scale = t.zero_work_scale[k];
        const double ratio = scale > 0.0 ? t.zero_work_residual[k] / scale
                                         : (t.zero_work_residual[k] > 0.0 ? 1.0 : 0.0);
        worst_zero = std::max(worst_zero, ratio);
      }
    }
  }

  // d(H_e + Psi)/dt = -beta_total xd^T M xd on a barrier-free forced-damped
  // system, finite-differenced on a finer grid than the shipped runs.
  ScenarioConfig c = runs.Config("random_forced_damped");
  c.integrator.dt = 0.001;
  c.integrator.duration = 4.0;
  double worst_rate = 0.0;
  int rate_samples = 0;
  const auto states = c.AllInitialStates();
  for (const VariantConfig& v : c.variants) {
    const BuiltSystem b = BuildSystem(c, v);
    for (const InitialState& st : states) {
      const Trajectory t =
          Rollout(*b.system, Eigen::Map<const Vec>(st.q.data(), st.q.size()),
                  Eigen::Map<const Vec>(st.qd.data(), st.qd.size()), c.integrator);
      std::vector<double> rhs(t.size());
      double peak = 0.0;
      for (int k = 0; k < t.size(); ++k) {
        const SystemEval ev = b.system->Evaluate(t.q[k], t.qd[k]);
        const Mat& m = ev.resolution.energy.metric();
        rhs[k] = -ev.trace.beta_total() * t.qd[k].dot(m * t.qd[k]);
        peak = std::max(peak, std::abs(rhs[k]));
      }
      const std::vector<double>& h = t.hamiltonian;
      for (int k = 2; k + 2 < t.size(); ++k) {
        // Relative error is meaningless once the system is at rest.
        if (std::abs(rhs[k]) < 1e-3 * peak) continue;
        // Fourth-order central difference.
        const double fd = (h[k - 2] - 8.0 * h[k - 1] + 8.0 * h[k + 1] - h[k + 2]) / (12.0 * t.dt);
        worst_rate = std::max(worst_rate, std::abs(fd - rhs[k]) / std::abs(rhs[k]));
        ++rate_samples;
      }
    }
  }
  Outcome o;
  o.pass = worst_zero <= 1e-10 && worst_rate <= 1e-3 && rate_samples > 0;
  o.detail = fmt::format(
      "zero-work worst {:.2e} over {} steps; dissipation worst relative {:.2e} over {} samples",
      worst_zero, steps, worst_rate, rate_samples);
  return o;
}

// 4. Geometric fabrics converge on the planar experiments, Lagrangian ones
// do not.
Outcome Planar(Runs& runs) {
  bool pass = true;
  double total = 0.0;
  std::string detail;
  for (const char* name : {"planar_exp1", "planar_exp2", "planar_exp3"}) {
    const ScenarioConfig& c = runs.Config(name);
    total += runs.RunSeconds(name);
    const RunResult& run = runs.Run(name);
    const RolloutResult* geo = nullptr;
    const RolloutResult* lag = nullptr;
    for (const VariantConfig& v : c.variants) {
      const RolloutResult* r = run.Find(v.name, 0);
      (v.style == FabricStyle::kGeometric ? geo : lag) = r;
    }
    if (geo == nullptr || lag == nullptr) return {false, fmt::format("{} lacks a variant", name)};
    const ConvergenceReport g = DetectConvergence(geo->traj, c.convergence);
    const ConvergenceReport l = DetectConvergence(lag->traj, c.convergence);
    const bool ok = g.converged && g.final_distance <= 1e-2 && !l.converged &&
                    l.final_distance >= 10.0 * g.final_distance;
    pass &= ok;
    detail += fmt::format("{}: geo {:.1e} lag {:.1e}; ", name, g.final_distance, l.final_distance);
  }
  pass &= total < 60.0;
  return {pass, detail + fmt::format("{:.1f} s", total)};
}

// 5. Particle grid: every geometric particle reaches the target without
// violations; geometric paths vary less across speeds.
Outcome ParticleGrid(Runs& runs) {
  const ScenarioConfig& c = runs.Config("particle_grid");
  const MetricsReport report = ComputeMetrics(c, runs.Run("particle_grid"));
  int reached = 0, total = 0;
  std::map<std::string, int> cells;
  for (const VariantConfig& v : c.variants) {
    if (v.style != FabricStyle::kGeometric) continue;
    cells[fmt::format("{}/{}", v.controller.desired_speed, BarrierMetricName(v.barrier_metric))]++;
  }
  for (const RolloutMetrics& m : report.rollouts) {
    const VariantConfig* v = c.FindVariant(m.variant);
    if (v->style != FabricStyle::kGeometric) continue;
    ++total;
    if (m.reached && m.failure_step < 0 && m.min_barrier_distance > 0.0) ++reached;
  }
  const StyleSummary* geo = report.Style("geometric");
  const StyleSummary* lag = report.Style("lagrangian");
  if (geo == nullptr || lag == nullptr) return {false, "missing style"};
  const bool grid = cells.size() == 4 && cells.count("2/velocity_gated") &&
                    cells.count("4/velocity_gated") && cells.count("2/position_only") &&
                    cells.count("4/position_only");
  Outcome o;
  o.pass = grid && total == 56 && reached == total && geo->pair_count > 0 &&
           geo->mean_cross_speed_l < lag->mean_cross_speed_l;
  o.detail = fmt::format("geometric reached {}/{}, mean cross-speed L geometric {:.4f} < lagrangian {:.4f}",
                         reached, total, geo->mean_cross_speed_l, lag->mean_cross_speed_l);
  return o;
}

// 6. Speed control reaches and holds v_d until the damping gate opens.
Outcome SpeedTrackingCheck(Runs& runs) {
  const ScenarioConfig& c = runs.Config("speed_vs_damping");
  const MetricsReport report = ComputeMetrics(c, runs.Run("speed_vs_damping"));
  double latest_entry = 0.0, worst_dev = 0.0;
  int tracked = 0, held = 0, damped = 0;
  for (const RolloutMetrics& m : report.rollouts) {
    const VariantConfig* v = c.FindVariant(m.variant);
    if (v->controller.mode == DampingMode::kBasicDamping) {
      if (m.failure_step < 0) ++damped;
      continue;
    }
    if (v->controller.desired_speed != 2.5) continue;
    ++tracked;
    const SpeedTracking& s = m.speed;
    if (s.entry_time >= 0.0 && s.entry_time <= 2.0 && s.held && s.gate_time > s.entry_time) {
      ++held;
    }
    latest_entry = std::max(latest_entry, s.entry_time < 0 ? 1e9 : s.entry_time);
    worst_dev = std::max(worst_dev, s.max_deviation);
  }
  Outcome o;
  o.pass = tracked > 0 && held == tracked && damped > 0;
  o.detail = fmt::format("{}/{} held, latest entry {:.2f} s, worst deviation {:.3f}; {} damped runs",
                         held, tracked, latest_entry, worst_dev, damped);
  return o;
}

// 7. Self-comparison is exactly zero; offset parallel lines give the offset.
Outcome PathDifferenceCheck(Runs& runs) {
  for (const std::string& name : ShippedScenarios()) runs.Run(name);
  int checked = 0;
  double worst_self = 0.0;
  for (const auto& [name, run] : runs.all()) {
    const PathSpace space = PathSpaceFor(runs.Config(name));
    for (const RolloutResult& r : run.rollouts) {
      worst_self = std::max(worst_self, PathDifference(r.traj, r.traj, space));
      ++checked;
    }
  }
  const double d = 0.25;
  SampledPath p;
  p.dt = 0.001;
  std::vector<Vec> q;
  for (int k = 0; k < 2000; ++k) {
    Vec a(2);
    a << 0.001 * k, 0.0;
    p.points.push_back(a);
    p.speeds.push_back(1.0);
    a[1] = d;
    q.push_back(a);
  }
  const double l = PathDifference(p, q);
  Outcome o;
  o.pass = checked > 0 && worst_self == 0.0 && std::abs(l - d) <= 1e-6;
  o.detail = fmt::format("{} trajectories self-compared, worst {}, parallel lines L = {:.9f}",
                         checked, worst_self, l);
  return o;
}

// 8. Analytic derivatives against finite differences.
Outcome Oracles() {
  Sampler s(808);
  double jac = 0.0, curv = 0.0, pull = 0.0, fins = 0.0;
  int maps = 0, energies = 0;
  const PlanarArm arm({1.0, 0.8, 0.6}, BasePose{0.1, -0.2, 0.3});
  Vec a(2), b(2);
  a << 0.0, 0.0;
  b << 1.0, 0.0;
  std::vector<std::pair<TaskMapPtr, double>> map_list = {
      {std::make_shared<IdentityMap>(3), 2.0},
      {std::make_shared<OffsetMap>(Vec::Constant(2, 0.5)), 2.0},
      {std::make_shared<CircleDistanceMap>(Vec::Constant(2, 0.2), 0.7), 3.0},
      {std::make_shared<JointLimitMap>(3, 1, 1.0, LimitSide::kUpper), 2.0},
      {std::make_shared<PlaneSignedDistanceMap>(Vec::Zero(2), Vec::Constant(2, 1.0)), 2.0},
      {std::make_shared<LineDistanceMap>(Vec::Zero(2), Vec::Constant(2, 1.0)), 3.0},
      {std::make_shared<ComposedMap>(std::make_shared<BodyPointMap>(arm, BodyPoint{1, 0.5}),
                                     std::make_shared<CircleDistanceMap>(Vec::Constant(2, 3.0),
                                                                         0.5)),
       3.0}};
  for (const BodyPoint& bp : arm.DefaultCollisionPoints()) {
    map_list.push_back({std::make_shared<BodyPointMap>(arm, bp), M_PI});
  }
  for (const auto& [map, box] : map_list) {
    ++maps;
    for (int i = 0; i < 100; ++i) {
      const oracle::MapErrors e = oracle::CheckTaskMap(
          *map, s.UniformVec(map->parent_dim(), -box, box),
          s.UniformVec(map->parent_dim(), -1.0, 1.0));
      jac = std::max(jac, e.jacobian);
      curv = std::max(curv, e.curvature);
    }
  }
  // Segment distance away from the face/end-region borders.
  {
    const SegmentSetDistanceMap seg({Segment{a, b}});
    ++maps;
    for (int i = 0; i < 100;) {
      const Vec q = s.UniformVec(2, -1.0, 2.0);
      if (std::abs(q[1]) < 0.05 || std::abs(q[0]) < 0.05 || std::abs(q[0] - 1.0) < 0.05) continue;
      const oracle::MapErrors e = oracle::CheckTaskMap(seg, q, s.UniformVec(2, -1.0, 1.0));
      jac = std::max(jac, e.jacobian);
      curv = std::max(curv, e.curvature);
      ++i;
    }
  }
  for (int i = 0; i < 100; ++i) {
    const BodyPointMap ee(arm, arm.end_effector());
    pull = std::max(pull, oracle::CheckPullback(oracle::RandomSpec(s, 2), ee,
                                                s.UniformVec(3, -3.0, 3.0),
                                                s.UniformVec(3, -1.0, 1.0)));
  }
  std::vector<std::pair<EnergyPtr, std::function<Vec(Sampler&)>>> energy_list = {
      {std::make_shared<EuclideanEnergy>(3), [](Sampler& r) { return r.UniformVec(3, -2, 2); }},
      {std::make_shared<GatedBarrierEnergy>(20.0, 2.0, false),
       [](Sampler& r) { return Vec::Constant(1, r.Uniform(0.1, 3.0)); }},
      {std::make_shared<GatedBarrierEnergy>(0.25, 1.0, true),
       [](Sampler& r) { return Vec::Constant(1, r.Uniform(0.1, 3.0)); }}};
  for (const auto& e : oracle::TermCatalog(PolicyKind::kGeometricHd2)) {
    energy_list.push_back({e.term->energy(), e.sample_x});
  }
  for (const auto& [energy, sample] : energy_list) {
    ++energies;
    for (int i = 0; i < 100; ++i) {
      const Vec x = sample(s);
      fins = std::max(fins,
                      oracle::CheckEnergy(*energy, x, oracle::SampleVelocity(s, energy->dim())).max());
    }
  }
  Outcome o;
  o.pass = jac <= 1e-6 && curv <= 1e-5 && pull <= 1e-5 && fins <= 1e-5;
  o.detail = fmt::format(
      "{} maps: jacobian {:.1e}, curvature {:.1e}; pullback {:.1e}; {} energies: {:.1e}", maps,
      jac, curv, pull, energies, fins);
  return o;
}

// 9. Forced, damped systems come to rest at a minimum of the potential.
Outcome ConvergenceToMinimum(Runs& runs) {
  const ScenarioConfig& c = runs.Config("random_forced_damped");
  const RunResult& run = runs.Run("random_forced_damped");
  double worst = 0.0;
  int count = 0;
  bool failed = false;
  for (const VariantConfig& v : c.variants) {
    const BuiltSystem b = BuildSystem(c, v);
    for (const RolloutResult& r : run.rollouts) {
      if (r.variant != v.name) continue;
      failed |= r.traj.failed();
      worst = std::max(worst, b.tree->PotentialGradient(r.traj.q.back()).norm());
      ++count;
    }
  }
  Outcome o;
  o.pass = !failed && count >= 20 && worst <= 1e-3;
  o.detail = fmt::format("{} rollouts without barriers, worst terminal |grad psi| {:.2e}", count,
                         worst);
  return o;
}

// 10. Re-running with a different thread count gives byte-identical CSVs.
Outcome Determinism(Runs& runs) {
  int compared = 0, differ = 0;
  for (const char* name : {"particle_grid", "random_forced_damped", "planar_exp1"}) {
    const RunResult& first = runs.Run(name);
    RunOptions opt;
    opt.threads = 1;
    const RunResult second = RunScenario(runs.Config(name), opt);
    if (second.rollouts.size() != first.rollouts.size()) return {false, "rollout count differs"};
    for (size_t i = 0; i < first.rollouts.size(); ++i) {
      std::ostringstream a, b;
      WriteCsv(first.rollouts[i].traj, a);
      WriteCsv(second.rollouts[i].traj, b);
      ++compared;
      if (a.str() != b.str()) ++differ;
    }
  }
  return {differ == 0, fmt::format("{} CSVs compared, {} differ", compared, differ)};
}

}  // namespace
}  // namespace fabrics

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string dir = FABRICS_SCENARIO_DIR;
  app.add_option("--scenarios", dir, "directory with the shipped scenario files");
  CLI11_PARSE(app, argc, argv);

  fabrics::Runs runs(dir);
  const std::vector<std::pair<std::string, std::function<fabrics::Outcome()>>> criteria = {
      {"HD2 suite", [&] { return fabrics::Hd2Suite(runs); }},
      {"energy conservation", [&] { return fabrics::EnergyConservation(runs); }},
      {"zero work and dissipation", [&] { return fabrics::Dissipation(runs); }},
      {"planar experiments", [&] { return fabrics::Planar(runs); }},
      {"particle grid", [&] { return fabrics::ParticleGrid(runs); }},
      {"speed control vs damping", [&] { return fabrics::SpeedTrackingCheck(runs); }},
      {"path difference", [&] { return fabrics::PathDifferenceCheck(runs); }},
      {"derivative oracles", [] { return fabrics::Oracles(); }},
      {"convergence to minimum", [&] { return fabrics::ConvergenceToMinimum(runs); }},
      {"determinism", [&] { return fabrics::Determinism(runs); }},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    fabrics::Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    fmt::print("criterion {:2d} {}: {} ({})\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
               o.detail);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
