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

#include "fabrics/geometry.h"

#include <cmath>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "fabrics/errors.h"

namespace fabrics {
namespace {

Vec Scalar1(double v) { return Vec::Constant(1, v); }

// Isotropic field h(|x|) I and its partials.
MetricFieldEval RadialField(const Vec& x, double h, double dh) {
  const auto n = x.size();
  MetricFieldEval out;
  out.metric = h * Mat::Identity(n, n);
  out.partials.resize(n);
  const double r = x.norm();
  for (int k = 0; k < n; ++k) {
    const double d = r > 0.0 ? dh * x[k] / r : 0.0;
    out.partials[k] = d * Mat::Identity(n, n);
  }
  return out;
}

// Metric value h(r) and slope h'(r) of the attractor priority.
std::pair<double, double> AttractorPriority(const AttractorParams& p, double r) {
  const double span = p.mbar - p.munder;
  if (p.metric == AttractorMetric::kRbf) {
    const double a2 = p.alpha_m * p.alpha_m;
    const double e = std::exp(-a2 * r * r);
    return {span * e + p.munder, -2.0 * a2 * r * span * e};
  }
  return {span * TanhSwitch(r, p.alpha_m, p.switch_radius, p.switch_sign) + p.munder,
          span * TanhSwitchSlope(r, p.alpha_m, p.switch_radius, p.switch_sign)};
}

// 1-D barrier term over `map`: metric gain / x^power, acceleration potential
// `psi1`, with either an HD2 policy -s(xd) xd^2 psi1'(x) or a forcing
// potential Psi with Psi' = g(x) psi1'(x), g ungated.
TermPtr MakeBarrierTerm(std::string name, TaskMapPtr map, double gain, double power,
                        BarrierMetric metric, PotentialSpec psi1, PolicyKind kind,
                        BarrierKind barrier, std::function<double(double)> closed_potential) {
  auto energy = std::make_shared<GatedBarrierEnergy>(gain, power,
                                                     metric == BarrierMetric::kVelocityGated);
  TermDefinition def;
  def.name = std::move(name);
  def.task_map = std::move(map);
  def.energy = energy;
  def.barrier = barrier;
  def.accel_potential = [psi1](const Vec& x) { return PotentialValue(psi1, x); };
  def.accel_potential_gradient = [psi1](const Vec& x) { return PotentialGradient(psi1, x); };
  if (kind == PolicyKind::kGeometricHd2) {
    def.role = TermRole::kGeometric;
    def.policy = [psi1](const Vec& x, const Vec& xd) -> Vec {
      const double s = VelocityGate(xd[0]);
      if (s == 0.0) return Vec::Zero(1);
      return -s * xd[0] * xd[0] * PotentialGradient(psi1, x);
    };
  } else {
    def.role = TermRole::kForcing;
    def.policy = [psi1](const Vec& x, const Vec&) -> Vec { return -PotentialGradient(psi1, x); };
    def.potential_gradient = [psi1, energy](const Vec& x) -> Vec {
      return energy->PositionMetric(x[0]) * PotentialGradient(psi1, x);
    };
    if (closed_potential) {
      def.potential = [closed_potential](const Vec& x) {
        if (!(x[0] > 0.0)) throw BarrierDomainError("barrier potential", x[0]);
        return closed_potential(x[0]);
      };
    } else {
      def.potential = [psi1, energy](const Vec& x) {
        return IntegrateFromInfinity(
            [&](double s) { return energy->PositionMetric(s); },
            [&](double s) { return PotentialGradient(psi1, Scalar1(s))[0]; }, x[0]);
      };
    }
  }
  return std::make_shared<FabricTerm>(std::move(def));
}

// Closed form of -int_x^inf gain s^-m psi1'(s) ds for psi1 = a / (c s^p).
std::function<double(double)> InversePowerPotential(double gain, double m,
                                                    const BarrierInversePower& b) {
  return [gain, m, b](double x) {
    return gain * b.p * b.alpha_b / (b.c * (m + b.p) * std::pow(x, m + b.p));
  };
}

// Soft-norm attractor term over `map` with an isotropic priority h(|x|).
TermPtr MakeRadialAttractor(std::string name, TaskMapPtr map, int dim,
                            std::function<std::pair<double, double>(double)> priority,
                            SoftNormAttractor psi1, PolicyKind kind) {
  TermDefinition def;
  def.name = std::move(name);
  def.task_map = std::move(map);
  def.energy = std::make_shared<RiemannianEnergy>(
      dim,
      [priority](const Vec& x) {
        const auto [h, dh] = priority(x.norm());
        return RadialField(x, h, dh);
      },
      def.name);
  def.accel_potential = [psi1](const Vec& x) { return PotentialValue(psi1, x); };
  def.accel_potential_gradient = [psi1](const Vec& x) { return PotentialGradient(psi1, x); };
  if (kind == PolicyKind::kGeometricHd2) {
    def.role = TermRole::kGeometric;
    def.policy = [psi1](const Vec& x, const Vec& xd) {
      return LiftHd2(-PotentialGradient(psi1, x), xd);
    };
  } else {
    def.role = TermRole::kForcing;
    def.policy = [psi1](const Vec& x, const Vec&) -> Vec { return -PotentialGradient(psi1, x); };
    def.potential_gradient = [psi1, priority](const Vec& x) -> Vec {
      return priority(x.norm()).first * PotentialGradient(psi1, x);
    };
    def.potential = [psi1, priority](const Vec& x) {
      return IntegrateRadial([&](double s) { return priority(s).first; },
                             [&](double s) { return SoftNormSlope(psi1, s); }, x.norm());
    };
  }
  return std::make_shared<FabricTerm>(std::move(def));
}

}  // namespace

FabricTerm::FabricTerm(TermDefinition definition) : def_(std::move(definition)) {
  if (!def_.energy) throw InvalidValueError(fmt::format("term '{}' has no energy", def_.name));
  if (!def_.task_map) throw InvalidValueError(fmt::format("term '{}' has no task map", def_.name));
  if (def_.task_map->child_dim() != def_.energy->dim()) {
    throw DimensionError(fmt::format("term '{}': map child dim {} != energy dim {}", def_.name,
                                     def_.task_map->child_dim(), def_.energy->dim()));
  }
  if (def_.role != TermRole::kExecutionEnergy && !def_.policy) {
    throw InvalidValueError(fmt::format("term '{}' has no policy", def_.name));
  }
  if (def_.role == TermRole::kForcing && !def_.potential_gradient) {
    throw InvalidValueError(fmt::format("forcing term '{}' has no potential", def_.name));
  }
}

TermEval FabricTerm::Evaluate(const Vec& x, const Vec& xd, bool with_potential) const {
  try {
    TermEval out;
    out.energy = def_.energy->Evaluate(x, xd);
    if (def_.role != TermRole::kExecutionEnergy) out.policy = def_.policy(x, xd);
    if (def_.role == TermRole::kForcing) {
      out.potential_gradient = def_.potential_gradient(x);
      if (with_potential && def_.potential) out.potential = def_.potential(x);
    }
    return out;
  } catch (const BarrierDomainError& e) {
    throw BarrierDomainError(def_.name, e.value());
  }
}

Vec FabricTerm::Policy(const Vec& x, const Vec& xd) const {
  if (!def_.policy) return Vec::Zero(x.size());
  try {
    return def_.policy(x, xd);
  } catch (const BarrierDomainError& e) {
    throw BarrierDomainError(def_.name, e.value());
  }
}

Vec LiftHd2(const Vec& pi0, const Vec& xd) {
  if (pi0.size() != xd.size()) throw DimensionError("lift_hd2: pi0 and xd dims differ");
  return xd.squaredNorm() * pi0;
}

double TanhSwitch(double value, double rate, double offset, double sign) {
  return 0.5 * (std::tanh(sign * rate * (value - offset)) + 1.0);
}

double TanhSwitchSlope(double value, double rate, double offset, double sign) {
  const double t = std::tanh(sign * rate * (value - offset));
  return 0.5 * sign * rate * (1.0 - t * t);
}

MetricFieldEval AttractorMetricField(const AttractorParams& params, const Vec& offset) {
  const auto [h, dh] = AttractorPriority(params, offset.norm());
  return RadialField(offset, h, dh);
}

TermPtr AttractorTerm(const AttractorParams& params, PolicyKind kind, std::string name) {
  if (!(params.mbar > params.munder && params.munder > 0.0)) {
    throw InvalidValueError("attractor needs mbar > munder > 0");
  }
  if (!(params.k > 0.0 && params.alpha_psi > 0.0 && params.alpha_m > 0.0)) {
    throw InvalidValueError("attractor needs k, alpha_psi, alpha_m > 0");
  }
  const int dim = static_cast<int>(params.target.size());
  return MakeRadialAttractor(
      std::move(name), std::make_shared<OffsetMap>(params.target), dim,
      [params](double r) { return AttractorPriority(params, r); },
      SoftNormAttractor{params.k, params.alpha_psi}, kind);
}

TermPtr ObstacleTerm(const ObstacleParams& params, PolicyKind kind, std::string name) {
  if (!(params.k_b > 0.0 && params.alpha_b > 0.0)) {
    throw InvalidValueError("obstacle needs k_b, alpha_b > 0");
  }
  const BarrierInversePower psi1{params.alpha_b, params.c, params.p};
  return MakeBarrierTerm(std::move(name),
                         std::make_shared<CircleDistanceMap>(params.origin, params.radius),
                         params.k_b, 2.0, params.metric, psi1, kind, BarrierKind::kObstacle,
                         InversePowerPotential(params.k_b, 2.0, psi1));
}

std::vector<TermPtr> JointLimitTerms(const JointLimitParams& params, PolicyKind kind) {
  if (params.lower.size() != params.upper.size()) {
    throw DimensionError("joint limits: lower and upper sizes differ");
  }
  if (!(params.lambda > 0.0)) throw InvalidValueError("joint limits need lambda > 0");
  const int n = static_cast<int>(params.lower.size());
  std::vector<TermPtr> terms;
  for (int j = 0; j < n; ++j) {
    if (!(params.lower[j] < params.upper[j])) {
      throw InvalidValueError(fmt::format("joint {}: lower limit must be below upper", j));
    }
    terms.push_back(MakeBarrierTerm(
        fmt::format("joint_limit_upper_{}", j),
        std::make_shared<JointLimitMap>(n, j, params.upper[j], LimitSide::kUpper), params.lambda,
        1.0, params.metric, params.potential, kind, BarrierKind::kLimit, nullptr));
    terms.push_back(MakeBarrierTerm(
        fmt::format("joint_limit_lower_{}", j),
        std::make_shared<JointLimitMap>(n, j, params.lower[j], LimitSide::kLower), params.lambda,
        1.0, params.metric, params.potential, kind, BarrierKind::kLimit, nullptr));
  }
  return terms;
}

TermPtr DefaultConfigTerm(const DefaultConfigParams& params, PolicyKind kind, std::string name) {
  if (!(params.lambda_dc > 0.0)) throw InvalidValueError("default config needs lambda_dc > 0");
  const auto n = params.q0.size();
  const SoftNormAttractor psi1{params.k, params.alpha_psi};
  const double lambda = params.lambda_dc;
  TermDefinition def;
  def.name = std::move(name);
  def.task_map = std::make_shared<OffsetMap>(params.q0);
  def.energy = std::make_shared<WeightedEuclideanEnergy>(lambda * Mat::Identity(n, n));
  def.accel_potential = [psi1](const Vec& x) { return PotentialValue(psi1, x); };
  def.accel_potential_gradient = [psi1](const Vec& x) { return PotentialGradient(psi1, x); };
  if (kind == PolicyKind::kGeometricHd2) {
    def.role = TermRole::kGeometric;
    def.policy = [psi1](const Vec& x, const Vec& xd) {
      return LiftHd2(-PotentialGradient(psi1, x), xd);
    };
  } else {
    def.role = TermRole::kForcing;
    def.policy = [psi1](const Vec& x, const Vec&) -> Vec { return -PotentialGradient(psi1, x); };
    def.potential_gradient = [psi1, lambda](const Vec& x) -> Vec {
      return lambda * PotentialGradient(psi1, x);
    };
    def.potential = [psi1, lambda](const Vec& x) { return lambda * PotentialValue(psi1, x); };
  }
  return std::make_shared<FabricTerm>(std::move(def));
}

std::vector<Segment> CubbyScene::Walls() const {
  const Eigen::Vector2d n = outward_normal.normalized();
  const Eigen::Vector2d t(-n.y(), n.x());
  const Eigen::Vector2d half = 0.5 * width * t;
  const Eigen::Vector2d back = opening_center - depth * n;
  auto v = [](const Eigen::Vector2d& p) { return Vec(p); };
  return {Segment{v(opening_center + half), v(back + half)},
          Segment{v(back + half), v(back - half)},
          Segment{v(back - half), v(opening_center - half)}};
}

Eigen::Vector2d CubbyScene::Waypoint(double offset) const {
  return opening_center + offset * outward_normal.normalized();
}

namespace {

struct CubbyFrame {
  Eigen::Vector2d o;
  Eigen::Vector2d n;
  Eigen::Vector2d t;
};

CubbyFrame FrameOf(const CubbyScene& scene) {
  const Eigen::Vector2d n = scene.outward_normal.normalized();
  return {scene.opening_center, n, Eigen::Vector2d(-n.y(), n.x())};
}

// Complement of the column gate: 1/2 (tanh(alpha_m (y2 - r)) + 1).
double ColumnGate(const CubbyParams& p, double y2) {
  return TanhSwitch(y2, p.alpha_m, p.r_switch, 1.0);
}

}  // namespace

double ExtractionPriority(const CubbyScene& scene, const CubbyParams& params,
                          const Eigen::Vector2d& x) {
  const CubbyFrame f = FrameOf(scene);
  const double y1 = f.n.dot(x - f.o);
  if (!(y1 < params.d_front)) return 0.0;
  const double y2 = std::abs(f.t.dot(x - f.o));
  return (params.mbar - params.munder) * ColumnGate(params, y2) + params.munder;
}

double WaypointGate(const CubbyScene& scene, const CubbyParams& params,
                    const Eigen::Vector2d& x) {
  const CubbyFrame f = FrameOf(scene);
  return ColumnGate(params, std::abs(f.t.dot(x - f.o)));
}

CubbyTerms MakeCubbyTerms(const CubbyScene& scene, const CubbyParams& params) {
  if (!(params.mbar > params.munder && params.munder > 0.0)) {
    throw InvalidValueError("cubby needs mbar > munder > 0");
  }
  if (!(scene.width > 0.0 && scene.depth > 0.0 && scene.outward_normal.norm() > 0.0)) {
    throw InvalidValueError("cubby needs positive width, depth and a nonzero normal");
  }
  const CubbyFrame f = FrameOf(scene);
  const auto identity = std::make_shared<IdentityMap>(2);
  const SoftNormAttractor attract{params.k, params.alpha_psi};
  CubbyTerms out;

  // Gradient of y2 = |t.(x - o)| and of the column gate.
  auto column = [f, params](const Vec& x) {
    const double signed_y2 = f.t.dot(Eigen::Vector2d(x) - f.o);
    const double y2 = std::abs(signed_y2);
    const Eigen::Vector2d dy2 = (signed_y2 >= 0.0 ? 1.0 : -1.0) * f.t;
    return std::make_tuple(ColumnGate(params, y2),
                           Eigen::Vector2d(TanhSwitchSlope(y2, params.alpha_m, params.r_switch,
                                                           1.0) * dy2));
  };

  {
    const Eigen::Matrix2d nn = f.n * f.n.transpose();
    TermDefinition def;
    def.name = "cubby_extraction";
    def.task_map = identity;
    def.role = TermRole::kGeometric;
    def.energy = std::make_shared<RiemannianEnergy>(
        2,
        [f, params, column, nn](const Vec& x) {
          MetricFieldEval out;
          out.partials.assign(2, Mat::Zero(2, 2));
          const double y1 = f.n.dot(Eigen::Vector2d(x) - f.o);
          if (!(y1 < params.d_front)) {
            out.metric = Mat::Zero(2, 2);
            return out;
          }
          const auto [s, ds] = column(x);
          const double span = params.mbar - params.munder;
          out.metric = (span * s + params.munder) * nn;
          for (int k = 0; k < 2; ++k) out.partials[k] = span * ds[k] * nn;
          return out;
        },
        def.name);
    const LimitPotential psi = params.extraction_potential;
    def.accel_potential = [f, psi](const Vec& x) {
      return PotentialValue(psi, Scalar1(f.n.dot(Eigen::Vector2d(x) - f.o)));
    };
    def.accel_potential_gradient = [f, psi](const Vec& x) -> Vec {
      const double g = PotentialGradient(psi, Scalar1(f.n.dot(Eigen::Vector2d(x) - f.o)))[0];
      return Vec(g * f.n);
    };
    def.policy = [f, psi](const Vec& x, const Vec& xd) -> Vec {
      const double y1 = f.n.dot(Eigen::Vector2d(x) - f.o);
      const double y1d = f.n.dot(Eigen::Vector2d(xd));
      return Vec(-y1d * y1d * PotentialGradient(psi, Scalar1(y1))[0] * f.n);
    };
    out.extraction = std::make_shared<FabricTerm>(std::move(def));
  }

  {
    // Target attraction is active only inside the target column.
    const Vec target = scene.target;
    auto priority = [params, column](const Vec& x) {
      const auto [s, ds] = column(x);
      const double span = params.mbar - params.munder;
      return std::make_pair(span * (1.0 - s) + params.munder, Eigen::Vector2d(-span * ds));
    };
    TermDefinition def;
    def.name = "cubby_target";
    def.task_map = identity;
    def.role = TermRole::kGeometric;
    def.energy = std::make_shared<RiemannianEnergy>(
        2,
        [priority](const Vec& x) {
          const auto [h, dh] = priority(x);
          MetricFieldEval out;
          out.metric = h * Mat::Identity(2, 2);
          out.partials = {dh[0] * Mat::Identity(2, 2), dh[1] * Mat::Identity(2, 2)};
          return out;
        },
        def.name);
    def.accel_potential = [attract, target](const Vec& x) {
      return PotentialValue(attract, Vec(x - target));
    };
    def.accel_potential_gradient = [attract, target](const Vec& x) {
      return PotentialGradient(attract, Vec(x - target));
    };
    def.policy = [attract, target](const Vec& x, const Vec& xd) {
      return LiftHd2(-PotentialGradient(attract, Vec(x - target)), xd);
    };
    out.target_attraction = std::make_shared<FabricTerm>(std::move(def));
  }

  {
    // Waypoint attraction: an RBF priority gated off inside the target column.
    const Vec waypoint = scene.Waypoint(params.waypoint_offset);
    const double span = params.mbar - params.munder;
    const double a2 = params.rbf_alpha_m * params.rbf_alpha_m;
    TermDefinition def;
    def.name = "cubby_waypoint";
    def.task_map = identity;
    def.role = TermRole::kGeometric;
    def.energy = std::make_shared<RiemannianEnergy>(
        2,
        [column, waypoint, params, span, a2](const Vec& x) {
          const auto [s, ds] = column(x);
          const Vec d = x - waypoint;
          const double e = std::exp(-a2 * d.squaredNorm());
          const double h = span * e + params.munder;
          const Vec dh = -2.0 * a2 * span * e * d;
          MetricFieldEval out;
          out.metric = s * h * Mat::Identity(2, 2);
          out.partials = {(ds[0] * h + s * dh[0]) * Mat::Identity(2, 2),
                          (ds[1] * h + s * dh[1]) * Mat::Identity(2, 2)};
          return out;
        },
        def.name);
    def.accel_potential = [attract, waypoint](const Vec& x) {
      return PotentialValue(attract, Vec(x - waypoint));
    };
    def.accel_potential_gradient = [attract, waypoint](const Vec& x) {
      return PotentialGradient(attract, Vec(x - waypoint));
    };
    def.policy = [attract, waypoint](const Vec& x, const Vec& xd) {
      return LiftHd2(-PotentialGradient(attract, Vec(x - waypoint)), xd);
    };
    out.waypoint = std::make_shared<FabricTerm>(std::move(def));
  }

  out.collision = MakeBarrierTerm(
      "cubby_collision", std::make_shared<SegmentSetDistanceMap>(scene.Walls()), params.k_b, 2.0,
      BarrierMetric::kVelocityGated, BarrierInversePower{params.alpha_b, 1.0, 8.0},
      PolicyKind::kGeometricHd2, BarrierKind::kObstacle, nullptr);
  return out;
}

TermPtr ExecutionEnergyTerm(int dim, double scale, std::string name) {
  if (!(scale > 0.0)) throw InvalidValueError("execution energy scale must be > 0");
  TermDefinition def;
  def.name = std::move(name);
  def.role = TermRole::kExecutionEnergy;
  def.task_map = std::make_shared<IdentityMap>(dim);
  def.energy = std::make_shared<WeightedEuclideanEnergy>(scale * Mat::Identity(dim, dim));
  return std::make_shared<FabricTerm>(std::move(def));
}

}  // namespace fabrics
