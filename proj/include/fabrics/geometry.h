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

// Fabric terms and the catalog of terms used to build behaviors.
//
// A term pairs a Finsler energy with an acceleration policy on some task
// space. Geometric terms carry HD2 policies and shape the fabric; forcing
// terms carry -d(psi_1) and a scalar potential Psi with grad Psi = G grad
// psi_1, and are the only terms allowed to bias where the system comes to
// rest. Execution-energy terms carry only an energy.

#ifndef FABRICS_GEOMETRY_H_
#define FABRICS_GEOMETRY_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fabrics/finsler_energy.h"
#include "fabrics/potentials.h"
#include "fabrics/task_map.h"

namespace fabrics {

enum class TermRole { kGeometric, kForcing, kExecutionEnergy };

// How a behavior term turns its potential into a policy: lifted to an HD2
// geometry, or used directly as a forcing (Lagrangian-style) term.
enum class PolicyKind { kGeometricHd2, kForcingPotential };

enum class BarrierKind { kNone, kObstacle, kLimit };

using AccelField = std::function<Vec(const Vec& x, const Vec& xd)>;
using ScalarField = std::function<double(const Vec& x)>;
using VectorField = std::function<Vec(const Vec& x)>;

struct TermDefinition {
  std::string name;
  TaskMapPtr task_map;  // edge from the space the term is placed under
  EnergyPtr energy;
  TermRole role = TermRole::kGeometric;
  AccelField policy;
  // Forcing terms only.
  ScalarField potential;
  VectorField potential_gradient;
  // The acceleration potential psi_1 behind the policy, when there is one.
  ScalarField accel_potential;
  VectorField accel_potential_gradient;
  BarrierKind barrier = BarrierKind::kNone;
};

struct TermEval {
  EnergyEval energy;
  Vec policy;              // empty for execution-energy terms
  Vec potential_gradient;  // forcing terms
  double potential = 0.0;  // forcing terms, when requested
};

class FabricTerm {
 public:
  explicit FabricTerm(TermDefinition definition);

  const std::string& name() const { return def_.name; }
  TermRole role() const { return def_.role; }
  BarrierKind barrier() const { return def_.barrier; }
  const TaskMapPtr& task_map() const { return def_.task_map; }
  const EnergyPtr& energy() const { return def_.energy; }
  int dim() const { return def_.energy->dim(); }

  // Throws BarrierDomainError naming the term when x leaves the domain.
  TermEval Evaluate(const Vec& x, const Vec& xd, bool with_potential = false) const;
  Vec Policy(const Vec& x, const Vec& xd) const;

  bool has_accel_potential() const { return static_cast<bool>(def_.accel_potential); }
  double AccelPotential(const Vec& x) const { return def_.accel_potential(x); }
  Vec AccelPotentialGradient(const Vec& x) const { return def_.accel_potential_gradient(x); }
  bool has_potential() const { return static_cast<bool>(def_.potential); }
  double Potential(const Vec& x) const { return def_.potential(x); }
  Vec PotentialGradient(const Vec& x) const { return def_.potential_gradient(x); }

 private:
  TermDefinition def_;
};

using TermPtr = std::shared_ptr<const FabricTerm>;

// |xd|^2 pi0.
Vec LiftHd2(const Vec& pi0, const Vec& xd);

// Velocity gate used by barrier metrics: 1 iff moving toward the barrier.
inline double VelocityGate(double xd) { return xd < 0.0 ? 1.0 : 0.0; }

// Half-open tanh switch 1/2 (tanh(sign * rate * (value - offset)) + 1).
double TanhSwitch(double value, double rate, double offset, double sign);
double TanhSwitchSlope(double value, double rate, double offset, double sign);

// ---------------------------------------------------------------------------
// Attractor over x = q - target.

enum class AttractorMetric {
  kRbf,         // (mbar - munder) exp(-(alpha_m |x|)^2) + munder
  kTanhSwitch,  // (mbar - munder) s(|x|) + munder, s a tanh switch at radius
};

struct AttractorParams {
  Vec target;
  double k = 10.0;
  double alpha_psi = 10.0;
  double mbar = 2.0;
  double munder = 0.2;
  double alpha_m = 0.75;
  AttractorMetric metric = AttractorMetric::kRbf;
  double switch_radius = 0.2;
  // -1 raises priority near the target; +1 is the opposite convention.
  double switch_sign = -1.0;
};

MetricFieldEval AttractorMetricField(const AttractorParams& params, const Vec& offset);
TermPtr AttractorTerm(const AttractorParams& params, PolicyKind kind,
                      std::string name = "attractor");

// ---------------------------------------------------------------------------
// Circular obstacle over x = |q - origin| / r - 1.

enum class BarrierMetric { kPositionOnly, kVelocityGated };

struct ObstacleParams {
  Vec origin;
  double radius = 1.0;
  double k_b = 20.0;
  double alpha_b = 1.0;
  double c = 2.0;
  double p = 8.0;
  BarrierMetric metric = BarrierMetric::kVelocityGated;
};

TermPtr ObstacleTerm(const ObstacleParams& params, PolicyKind kind,
                     std::string name = "obstacle");

// ---------------------------------------------------------------------------
// Joint limits: one term per side per joint over x = upper - q_j and
// x = q_j - lower, metric s(xd) lambda / x.

struct JointLimitParams {
  std::vector<double> lower;
  std::vector<double> upper;
  double lambda = 0.25;
  LimitPotential potential;
  BarrierMetric metric = BarrierMetric::kVelocityGated;
};

std::vector<TermPtr> JointLimitTerms(const JointLimitParams& params, PolicyKind kind);

// ---------------------------------------------------------------------------
// Default configuration over x = q - q0 with metric lambda_dc I.

struct DefaultConfigParams {
  Vec q0;
  double lambda_dc = 0.5;
  double k = 1.0;
  double alpha_psi = 10.0;
};

TermPtr DefaultConfigTerm(const DefaultConfigParams& params, PolicyKind kind,
                          std::string name = "default_config");

// ---------------------------------------------------------------------------
// Cubby heuristics for a planar box open on one side.

struct CubbyScene {
  Eigen::Vector2d opening_center;  // middle of the open face
  Eigen::Vector2d outward_normal;  // points out of the cubby
  double width = 0.3;
  double depth = 0.3;
  Eigen::Vector2d target;          // end-effector target inside the cubby

  std::vector<Segment> Walls() const;
  Eigen::Vector2d Waypoint(double offset) const;
};

struct CubbyParams {
  double mbar = 2.0;
  double munder = 0.2;
  double alpha_m = 20.0;
  double r_switch = 0.15;
  double d_front = 0.1;
  double waypoint_offset = 0.15;
  double k = 10.0;          // attraction potentials
  double alpha_psi = 10.0;
  double rbf_alpha_m = 0.75;
  LimitPotential extraction_potential{0.0, 0.2, 20.0, 5.0};
  double k_b = 20.0;        // collision metric
  double alpha_b = 1.0;     // collision potential alpha_b / y^8
};

struct CubbyTerms {
  TermPtr extraction;          // end-effector space
  TermPtr target_attraction;   // end-effector space
  TermPtr waypoint;            // end-effector space
  TermPtr collision;           // body-point space, shared by every point
};

// Extraction metric s(y1) ((mbar - munder) s(y2) + munder), with s(y1) = 1
// iff y1 < d_front and s(y2) = 1/2 (tanh(alpha_m (y2 - r_switch)) + 1).
double ExtractionPriority(const CubbyScene& scene, const CubbyParams& params,
                          const Eigen::Vector2d& x);
// s(y2) for the waypoint term: vanishes on the cubby center line.
double WaypointGate(const CubbyScene& scene, const CubbyParams& params,
                    const Eigen::Vector2d& x);

CubbyTerms MakeCubbyTerms(const CubbyScene& scene, const CubbyParams& params);

// ---------------------------------------------------------------------------

// Plain execution energy 1/2 xd^T G xd with G = scale * I.
TermPtr ExecutionEnergyTerm(int dim, double scale, std::string name = "execution_energy");

}  // namespace fabrics

#endif  // FABRICS_GEOMETRY_H_
