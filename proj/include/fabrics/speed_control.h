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

// Energization and the speed regulator that assembles the root
// acceleration.

#ifndef FABRICS_SPEED_CONTROL_H_
#define FABRICS_SPEED_CONTROL_H_

#include "fabrics/spec_algebra.h"
#include "fabrics/transform_tree.h"

namespace fabrics {

// xd counts as a rest direction when xd^T M xd <= kRestTolerance |M| |xd|^2,
// with |M| the largest entry magnitude. The test is scale-free in xd.
inline constexpr double kRestTolerance = 1e-12;

// alpha such that xdd = pi + alpha xd conserves the energy with tensor M and
// curvature force f: alpha = -(xd^T M xd)^-1 xd^T (M pi + f). Zero at rest.
double EnergizationAlpha(const Mat& metric, const Vec& force, const Vec& pi, const Vec& xd);

// f_f = P_e [-M pi - f], P_e = M (M^-1 - xd xd^T / (xd^T M xd)), so that
// xd^T f_f = 0. At rest the rank-1 correction is dropped.
Vec ZeroWorkForce(const Mat& metric, const Vec& force, const Vec& pi, const Vec& xd);

enum class EtaMode { kGated, kFixed };

struct SpeedControlParams {
  double b_base = 0.01;      // B lower bound
  double b_gain = 6.0;       // B
  double alpha_beta = 5.0;   // s_beta rate
  double radius = 0.5;       // s_beta radius
  double alpha_eta = 5.0;    // eta rate
  double alpha_shift = 0.0;  // eta offset
  double exec_target = 2.0;  // L_ex^d
  double boost_gain = 10.0;  // k
  double epsilon = 1e-6;
  EtaMode eta_mode = EtaMode::kGated;
  double eta_fixed = 0.0;

  // Throws InvalidValueError when the invariants fail.
  void Validate() const;
};

struct RegulatorTrace {
  double alpha_le = 0.0;
  double alpha_ex0 = 0.0;
  double alpha_ex_psi = 0.0;
  double alpha_ex_eta = 0.0;
  double s_beta = 0.0;
  double eta = 0.0;
  double beta_reg = 0.0;
  double alpha_boost = 0.0;
  double alpha_reg = 0.0;

  // Effective damping in the dissipation identity dH/dt = -beta xd^T M xd.
  double beta_total() const { return alpha_le - alpha_reg; }
};

// 1/2 (tanh(-alpha_beta (d - r)) + 1).
double DampingGate(const SpeedControlParams& params, double goal_distance);
// 1/2 (tanh(-alpha_eta (L_ex - L_ex^d) - alpha_shift) + 1), or the fixed value.
double EnergyGate(const SpeedControlParams& params, double exec_energy);

// Gate values held over one integration step. The boost coefficient is
// recomputed from the stage velocity since it scales with 1 / |xd|.
struct FrozenGates {
  double s_beta = 0.0;
  double eta = 0.0;
};

FrozenGates ComputeGates(const SpeedControlParams& params, double goal_distance,
                         double exec_energy);

// k eta (1 - s_beta) / (|xd| + epsilon).
double BoostCoefficient(const SpeedControlParams& params, const FrozenGates& gates,
                        const Vec& xd);

struct Regulated {
  Vec qdd;
  RegulatorTrace trace;
};

// xdd = a_psi + pi0 + alpha_reg xd. When `gates` is null they are computed
// from the current state.
Regulated Regulate(const RootSolution& solution, const RootResolution& resolution,
                   double goal_distance, const Vec& xd, const SpeedControlParams& params,
                   const FrozenGates* gates = nullptr);

// Energized fabric with constant damping: xdd = pi0 + a_psi + (alpha_Le - beta) xd.
Regulated BasicDamping(const RootSolution& solution, const RootResolution& resolution,
                       double beta, const Vec& xd);

// Unforced energized fabric: xdd = pi0 + alpha_Le xd. The forcing terms still
// contribute their energy; only their force is dropped.
Regulated Energized(const RootSolution& solution, const RootResolution& resolution,
                    const Vec& xd);

}  // namespace fabrics

#endif  // FABRICS_SPEED_CONTROL_H_
