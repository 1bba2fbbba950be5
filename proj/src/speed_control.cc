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

#include "fabrics/speed_control.h"

#include <algorithm>
#include <cmath>

#include "fabrics/errors.h"

namespace fabrics {
namespace {

void CheckSizes(const Mat& metric, const Vec& force, const Vec& pi, const Vec& xd) {
  const auto n = xd.size();
  if (metric.rows() != n || metric.cols() != n || force.size() != n || pi.size() != n) {
    throw DimensionError("energization operands differ in size");
  }
}

bool AtRest(const Mat& metric, const Vec& xd, double denom) {
  const double scale = metric.size() == 0 ? 0.0 : metric.cwiseAbs().maxCoeff();
  return !(denom > kRestTolerance * scale * xd.squaredNorm());
}

}  // namespace

double EnergizationAlpha(const Mat& metric, const Vec& force, const Vec& pi, const Vec& xd) {
  CheckSizes(metric, force, pi, xd);
  const double denom = xd.dot(metric * xd);
  if (AtRest(metric, xd, denom)) return 0.0;
  return -xd.dot(metric * pi + force) / denom;
}

Vec ZeroWorkForce(const Mat& metric, const Vec& force, const Vec& pi, const Vec& xd) {
  CheckSizes(metric, force, pi, xd);
  const Vec v = -(metric * pi) - force;
  const Vec mxd = metric * xd;
  const double denom = xd.dot(mxd);
  if (AtRest(metric, xd, denom)) return v;
  // M (M^-1 - xd xd^T / d) v = v - M xd (xd^T v) / d. The projection is
  // idempotent; a second pass removes the cancellation left by the first.
  Vec f = v - mxd * (xd.dot(v) / denom);
  f -= mxd * (xd.dot(f) / denom);
  return f;
}

void SpeedControlParams::Validate() const {
  if (!(b_base > 0.0)) throw InvalidValueError("speed control: B_base must be > 0");
  if (!(b_gain > b_base)) throw InvalidValueError("speed control: B_gain must exceed B_base");
  if (!(epsilon > 0.0)) throw InvalidValueError("speed control: epsilon must be > 0");
  if (!(boost_gain >= 0.0)) throw InvalidValueError("speed control: boost gain must be >= 0");
  if (eta_mode == EtaMode::kFixed && !(eta_fixed >= 0.0 && eta_fixed <= 1.0)) {
    throw InvalidValueError("speed control: fixed eta must lie in [0, 1]");
  }
}

double DampingGate(const SpeedControlParams& params, double goal_distance) {
  return 0.5 * (std::tanh(-params.alpha_beta * (goal_distance - params.radius)) + 1.0);
}

double EnergyGate(const SpeedControlParams& params, double exec_energy) {
  if (params.eta_mode == EtaMode::kFixed) return params.eta_fixed;
  return 0.5 * (std::tanh(-params.alpha_eta * (exec_energy - params.exec_target) -
                          params.alpha_shift) +
                1.0);
}

FrozenGates ComputeGates(const SpeedControlParams& params, double goal_distance,
                         double exec_energy) {
  return {DampingGate(params, goal_distance), EnergyGate(params, exec_energy)};
}

double BoostCoefficient(const SpeedControlParams& params, const FrozenGates& gates,
                        const Vec& xd) {
  return params.boost_gain * gates.eta * (1.0 - gates.s_beta) / (xd.norm() + params.epsilon);
}

Regulated Regulate(const RootSolution& solution, const RootResolution& resolution,
                   double goal_distance, const Vec& xd, const SpeedControlParams& params,
                   const FrozenGates* gates) {
  const FrozenGates g =
      gates != nullptr ? *gates
                       : ComputeGates(params, goal_distance, resolution.exec_energy_value);
  RegulatorTrace t;
  const SpecValue& e = resolution.energy;
  const SpecValue& ex = resolution.exec_energy;
  t.alpha_le = EnergizationAlpha(e.metric(), e.force(), solution.pi0, xd);
  t.alpha_ex0 = EnergizationAlpha(ex.metric(), ex.force(), solution.pi0, xd);
  t.alpha_ex_psi =
      EnergizationAlpha(ex.metric(), ex.force(), Vec(solution.pi0 + solution.a_psi), xd);
  t.s_beta = g.s_beta;
  t.eta = g.eta;
  t.alpha_ex_eta = t.eta * t.alpha_ex0 + (1.0 - t.eta) * t.alpha_ex_psi;
  t.beta_reg =
      t.s_beta * params.b_gain + params.b_base + std::max(0.0, t.alpha_ex_eta - t.alpha_le);
  t.alpha_boost = BoostCoefficient(params, g, xd);
  t.alpha_reg = t.alpha_ex_eta - t.beta_reg + t.alpha_boost;
  return {solution.a_psi + solution.pi0 + t.alpha_reg * xd, t};
}

Regulated BasicDamping(const RootSolution& solution, const RootResolution& resolution,
                       double beta, const Vec& xd) {
  if (!(beta > 0.0)) throw InvalidValueError("basic damping needs beta > 0");
  RegulatorTrace t;
  const SpecValue& e = resolution.energy;
  t.alpha_le = EnergizationAlpha(e.metric(), e.force(), solution.pi0, xd);
  t.beta_reg = beta;
  t.alpha_reg = t.alpha_le - beta;
  return {solution.pi0 + solution.a_psi + t.alpha_reg * xd, t};
}

Regulated Energized(const RootSolution& solution, const RootResolution& resolution,
                    const Vec& xd) {
  RegulatorTrace t;
  const SpecValue& e = resolution.energy;
  t.alpha_le = EnergizationAlpha(e.metric(), e.force(), solution.pi0, xd);
  t.alpha_reg = t.alpha_le;
  return {solution.pi0 + t.alpha_reg * xd, t};
}

}  // namespace fabrics
