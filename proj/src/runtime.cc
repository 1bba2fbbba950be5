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

#include "fabrics/runtime.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <tuple>

#include <fmt/format.h>

#include "fabrics/errors.h"

namespace fabrics {

void IntegratorConfig::Validate() const {
  if (!(dt > 0.0)) throw InvalidValueError("integrator dt must be > 0");
  if (!(duration >= dt)) throw InvalidValueError("integrator duration must be >= dt");
}

int IntegratorConfig::steps() const { return static_cast<int>(std::lround(duration / dt)); }

std::pair<Vec, Vec> Step(const AccelFn& accel, const Vec& q, const Vec& qd, double dt,
                         Integrator method) {
  if (method == Integrator::kEuler) {
    const Vec a = accel(q, qd);
    return {q + dt * qd, qd + dt * a};
  }
  const double h = 0.5 * dt;
  const Vec k1v = qd;
  const Vec k1a = accel(q, qd);
  const Vec k2v = qd + h * k1a;
  const Vec k2a = accel(q + h * k1v, k2v);
  const Vec k3v = qd + h * k2a;
  const Vec k3a = accel(q + h * k2v, k3v);
  const Vec k4v = qd + dt * k3a;
  const Vec k4a = accel(q + dt * k3v, k4v);
  return {q + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
          qd + (dt / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)};
}

FabricSystem::FabricSystem(std::shared_ptr<const TransformTree> tree, ControllerConfig controller,
                           GoalFn goal_offset)
    : tree_(std::move(tree)), controller_(std::move(controller)), goal_(std::move(goal_offset)) {
  if (!tree_) throw InvalidValueError("fabric system needs a tree");
  if (!goal_) throw InvalidValueError("fabric system needs a goal function");
  if (controller_.mode == DampingMode::kSpeedControl) controller_.speed.Validate();
  if (controller_.mode == DampingMode::kBasicDamping && !(controller_.beta > 0.0)) {
    throw InvalidValueError("basic damping needs beta > 0");
  }
}

FrozenGates FabricSystem::Gates(const Vec& q,
                                const RootResolution& resolution) const {
  return ComputeGates(controller_.speed, goal_(q).norm(), resolution.exec_energy_value);
}

SystemEval FabricSystem::Evaluate(const Vec& q, const Vec& qd, const FrozenGates* gates,
                                  bool with_potential) const {
  SystemEval out;
  out.resolution = tree_->Evaluate(q, qd, with_potential);
  out.solution = ResolveRoot(out.resolution, controller_.ridge);
  Regulated r;
  switch (controller_.mode) {
    case DampingMode::kSpeedControl:
      r = Regulate(out.solution, out.resolution, goal_(q).norm(), qd, controller_.speed, gates);
      break;
    case DampingMode::kBasicDamping:
      r = BasicDamping(out.solution, out.resolution, controller_.beta, qd);
      break;
    case DampingMode::kEnergized:
      r = Energized(out.solution, out.resolution, qd);
      break;
  }
  out.qdd = std::move(r.qdd);
  out.trace = r.trace;
  return out;
}

std::string_view TerminationName(Termination t) {
  switch (t) {
    case Termination::kDurationReached:
      return "duration_reached";
    case Termination::kConverged:
      return "converged";
    case Termination::kBarrierViolation:
      return "barrier_violation";
    case Termination::kDivergence:
      return "divergence";
  }
  return "unknown";
}

namespace {

bool Finite(const Vec& v) { return v.allFinite(); }

void Record(Trajectory& traj, double t, const Vec& q, const Vec& qd, const SystemEval& ev,
            const FabricSystem& system, const RolloutOptions& options) {
  traj.times.push_back(t);
  traj.q.push_back(q);
  traj.qd.push_back(qd);
  traj.qdd.push_back(ev.qdd);
  if (options.end_effector) traj.ee.push_back(options.end_effector(q));
  traj.goal_distance.push_back(system.GoalOffset(q).norm());
  const RootResolution& res = ev.resolution;
  traj.fabric_energy.push_back(res.fabric_energy);
  traj.exec_energy.push_back(res.exec_energy_value);
  traj.potential.push_back(res.potential);
  traj.hamiltonian.push_back(res.fabric_hamiltonian + res.potential);
  traj.min_obstacle_distance.push_back(res.min_obstacle_distance);
  traj.min_barrier_distance.push_back(res.min_barrier_distance);
  // The zero-work ratio is homogeneous in (force, pi0); a power-of-two rescale
  // keeps tiny forces out of the subnormal range without changing it.
  const Mat& metric = res.energy.metric();
  const double mag = std::max(res.energy.force().lpNorm<Eigen::Infinity>(),
                              (metric * ev.solution.pi0).lpNorm<Eigen::Infinity>());
  const double unit = mag > 0.0 && std::isfinite(mag) ? std::ldexp(1.0, -std::ilogb(mag)) : 1.0;
  const Vec ff = ZeroWorkForce(metric, unit * res.energy.force(), unit * ev.solution.pi0, qd);
  traj.zero_work_residual.push_back(std::abs(qd.dot(ff)));
  traj.zero_work_scale.push_back(ff.stableNorm() * qd.stableNorm());
  traj.traces.push_back(ev.trace);
}

}  // namespace

Trajectory Rollout(const FabricSystem& system, const Vec& q0, const Vec& qd0,
                   const IntegratorConfig& config, const RolloutOptions& options) {
  config.Validate();
  if (q0.size() != system.dim() || qd0.size() != system.dim()) {
    throw DimensionError(fmt::format("initial state must have dim {}", system.dim()));
  }
  Trajectory traj;
  traj.dt = config.dt;
  const int n = config.steps();
  Vec q = q0;
  Vec qd = qd0;
  int settled = 0;

  auto fail = [&](Termination why, int step, std::string message) {
    traj.termination = why;
    traj.failure_step = step;
    traj.failure_message = std::move(message);
  };

  for (int k = 0; k < n; ++k) {
    SystemEval ev;
    try {
      ev = system.Evaluate(q, qd, nullptr, true);
    } catch (const BarrierDomainError& e) {
      fail(Termination::kBarrierViolation, k, e.what());
      break;
    }
    if (!Finite(ev.qdd)) {
      fail(Termination::kDivergence, k, "non-finite acceleration");
      break;
    }
    Record(traj, k * config.dt, q, qd, ev, system, options);

    if (options.stop_on_convergence) {
      const ConvergenceCriteria& c = *options.stop_on_convergence;
      const bool ok = traj.goal_distance.back() <= c.pos_tol && qd.norm() <= c.vel_tol;
      settled = ok ? settled + 1 : 0;
      if (settled >= c.window) {
        traj.termination = Termination::kConverged;
        break;
      }
    }
    if (k + 1 == n) break;

    const FrozenGates gates = system.Gates(q, ev.resolution);
    bool first = true;
    AccelFn accel = [&](const Vec& qs, const Vec& qds) -> Vec {
      if (first) {
        first = false;
        return ev.qdd;
      }
      return system.Evaluate(qs, qds, &gates).qdd;
    };
    try {
      std::tie(q, qd) = Step(accel, q, qd, config.dt, config.method);
    } catch (const BarrierDomainError& e) {
      fail(Termination::kBarrierViolation, k + 1, e.what());
      break;
    }
    if (!Finite(q) || !Finite(qd) || q.norm() > options.divergence_limit ||
        qd.norm() > options.divergence_limit) {
      fail(Termination::kDivergence, k + 1, "state left the finite bound");
      break;
    }
  }
  return traj;
}

ConvergenceReport DetectConvergence(const Trajectory& traj, const ConvergenceCriteria& criteria) {
  if (traj.size() == 0) throw InvalidValueError("convergence check on an empty trajectory");
  ConvergenceReport report;
  const int n = traj.size();
  report.final_distance = traj.goal_distance.back();
  report.final_speed = traj.qd.back().norm();
  int first_ok = n;
  for (int k = n - 1; k >= 0; --k) {
    if (traj.goal_distance[k] <= criteria.pos_tol && traj.qd[k].norm() <= criteria.vel_tol) {
      first_ok = k;
    } else {
      break;
    }
  }
  const int window = std::min(criteria.window, n);
  report.converged = !traj.failed() && n - first_ok >= window && first_ok < n;
  if (report.converged) report.converged_step = first_ok;
  return report;
}

void WriteCsv(const Trajectory& traj, std::ostream& out) {
  const int dim = traj.size() > 0 ? static_cast<int>(traj.q.front().size()) : 0;
  const bool arm = !traj.ee.empty();
  fmt::memory_buffer buf;
  auto it = std::back_inserter(buf);
  fmt::format_to(it, "t");
  for (const char* prefix : {"q", "qd", "qdd"}) {
    for (int i = 0; i < dim; ++i) fmt::format_to(it, ",{}{}", prefix, i);
  }
  if (arm) fmt::format_to(it, ",ee_x,ee_y");
  fmt::format_to(it, ",L_e,L_ex,H_total,s_beta,eta,beta_reg,alpha_reg,alpha_boost,"
                     "min_obstacle_dist\n");
  for (int k = 0; k < traj.size(); ++k) {
    fmt::format_to(it, "{:.17g}", traj.times[k]);
    for (const auto* series : {&traj.q, &traj.qd, &traj.qdd}) {
      for (int i = 0; i < dim; ++i) fmt::format_to(it, ",{:.17g}", (*series)[k][i]);
    }
    if (arm) fmt::format_to(it, ",{:.17g},{:.17g}", traj.ee[k].x(), traj.ee[k].y());
    const RegulatorTrace& t = traj.traces[k];
    fmt::format_to(it, ",{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                   traj.fabric_energy[k], traj.exec_energy[k], traj.hamiltonian[k], t.s_beta,
                   t.eta, t.beta_reg, t.alpha_reg, t.alpha_boost, traj.min_obstacle_distance[k]);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace fabrics
