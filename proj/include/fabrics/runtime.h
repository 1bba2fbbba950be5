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

// Fixed-step integration, trajectory recording and convergence detection.

#ifndef FABRICS_RUNTIME_H_
#define FABRICS_RUNTIME_H_

#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fabrics/speed_control.h"
#include "fabrics/transform_tree.h"

namespace fabrics {

enum class Integrator { kEuler, kRk4 };

struct IntegratorConfig {
  Integrator method = Integrator::kRk4;
  double dt = 0.01;
  double duration = 15.0;

  void Validate() const;
  int steps() const;  // round(duration / dt)
};

using AccelFn = std::function<Vec(const Vec& q, const Vec& qd)>;

// One step of the first-order lift (q, qd) -> (qd, qdd).
std::pair<Vec, Vec> Step(const AccelFn& accel, const Vec& q, const Vec& qd, double dt,
                         Integrator method);

enum class DampingMode {
  kSpeedControl,  // regulator
  kBasicDamping,  // energized fabric with constant damping beta
  kEnergized,     // unforced energized fabric, no damping
};

struct ControllerConfig {
  DampingMode mode = DampingMode::kSpeedControl;
  SpeedControlParams speed;
  double beta = 4.0;
  double ridge = kDefaultRidge;
};

// Maps q to the goal-space offset (e.g. end-effector minus target).
using GoalFn = std::function<Vec(const Vec& q)>;

struct SystemEval {
  Vec qdd;
  RegulatorTrace trace;
  RootResolution resolution;
  RootSolution solution;
};

class FabricSystem {
 public:
  FabricSystem(std::shared_ptr<const TransformTree> tree, ControllerConfig controller,
               GoalFn goal_offset);

  const TransformTree& tree() const { return *tree_; }
  const ControllerConfig& controller() const { return controller_; }
  int dim() const { return tree_->root_dim(); }
  Vec GoalOffset(const Vec& q) const { return goal_(q); }

  FrozenGates Gates(const Vec& q, const RootResolution& resolution) const;
  SystemEval Evaluate(const Vec& q, const Vec& qd, const FrozenGates* gates = nullptr,
                      bool with_potential = false) const;

 private:
  std::shared_ptr<const TransformTree> tree_;
  ControllerConfig controller_;
  GoalFn goal_;
};

enum class Termination { kDurationReached, kConverged, kBarrierViolation, kDivergence };
std::string_view TerminationName(Termination t);

struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Vec> q;
  std::vector<Vec> qd;
  std::vector<Vec> qdd;
  std::vector<Eigen::Vector2d> ee;  // filled when an end-effector function is given
  std::vector<double> goal_distance;
  std::vector<double> fabric_energy;
  std::vector<double> exec_energy;
  std::vector<double> hamiltonian;  // H_e + Psi
  std::vector<double> potential;
  std::vector<double> min_obstacle_distance;
  std::vector<double> min_barrier_distance;
  std::vector<double> zero_work_residual;  // |xd^T f_f|
  std::vector<double> zero_work_scale;     // |f_f| |xd|
  std::vector<RegulatorTrace> traces;
  Termination termination = Termination::kDurationReached;
  int failure_step = -1;
  std::string failure_message;

  int size() const { return static_cast<int>(times.size()); }
  bool failed() const {
    return termination == Termination::kBarrierViolation ||
           termination == Termination::kDivergence;
  }
};

struct ConvergenceCriteria {
  double pos_tol = 1e-2;
  double vel_tol = 1e-3;
  int window = 50;
};

struct RolloutOptions {
  std::function<Eigen::Vector2d(const Vec& q)> end_effector;
  // Stop as soon as the convergence criteria hold over the window.
  std::optional<ConvergenceCriteria> stop_on_convergence;
  double divergence_limit = 1e6;
};

// Records round(duration / dt) rows, row k at t = k dt. Regulator gates are
// held over each step while channel specs are re-evaluated per stage.
Trajectory Rollout(const FabricSystem& system, const Vec& q0, const Vec& qd0,
                   const IntegratorConfig& config, const RolloutOptions& options = {});

struct ConvergenceReport {
  bool converged = false;
  int converged_step = -1;  // first step from which every later sample holds
  double final_distance = 0.0;
  double final_speed = 0.0;
};

ConvergenceReport DetectConvergence(const Trajectory& traj, const ConvergenceCriteria& criteria);

void WriteCsv(const Trajectory& traj, std::ostream& out);

}  // namespace fabrics

#endif  // FABRICS_RUNTIME_H_
