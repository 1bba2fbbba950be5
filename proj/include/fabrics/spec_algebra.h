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

// Evaluated second-order equation fragments and their algebra.
//
// A natural-form spec (M, f) stands for M xdd + f = 0 on some space. Specs on
// the same space add; specs on a child space are pulled back to the parent
// through a task map evaluation (x, J, Jdot qdot). A policy-form value
// [M, pi] stands for xdd = pi prioritized by M.

#ifndef FABRICS_SPEC_ALGEBRA_H_
#define FABRICS_SPEC_ALGEBRA_H_

#include <span>

#include <Eigen/Dense>

namespace fabrics {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Ridge added to every metric inversion. Gated metrics can be exactly zero.
inline constexpr double kDefaultRidge = 1e-9;

// Natural-form spec (M, f). Immutable once constructed. The metric is
// symmetrized on construction and checked to be finite and PSD.
class SpecValue {
 public:
  SpecValue(Mat metric, Vec force);

  static SpecValue Zero(int dim);

  // Sums and pullbacks of PSD specs are PSD up to round-off that scales with
  // the operands rather than the result, so they skip the PSD check.
  static SpecValue FromPsdOperands(Mat metric, Vec force);

  int dim() const { return static_cast<int>(force_.size()); }
  const Mat& metric() const { return metric_; }
  const Vec& force() const { return force_; }

 private:
  struct Unchecked {};
  SpecValue(Mat metric, Vec force, Unchecked);

  Mat metric_;
  Vec force_;
};

// Evaluated task map x = phi(q) with its Jacobian and curvature term Jdot qdot.
struct TaskMapEval {
  Vec x;
  Mat jacobian;   // child_dim x parent_dim
  Vec curvature;  // child_dim

  int parent_dim() const { return static_cast<int>(jacobian.cols()); }
  int child_dim() const { return static_cast<int>(jacobian.rows()); }

  // Throws InvalidValueError on non-finite entries or inconsistent sizes.
  void Validate() const;
};

// Policy-form value [M, pi].
struct PolicyValue {
  Mat metric;
  Vec acceleration;

  int dim() const { return static_cast<int>(acceleration.size()); }
};

// Whether the curvature term J̇q̇ participates in a pullback. Forces that are
// gradients of a scalar (forcing potentials) transform as covectors and skip
// it; every other channel includes it.
enum class CurvatureTransport { kInclude, kCovectorOnly };

SpecValue SumSpecs(const SpecValue& a, const SpecValue& b);
inline SpecValue operator+(const SpecValue& a, const SpecValue& b) {
  return SumSpecs(a, b);
}

// (J^T M J, J^T (f + M Jdot qdot)).
SpecValue PullbackSpec(const SpecValue& spec, const TaskMapEval& tme,
                       CurvatureTransport transport = CurvatureTransport::kInclude);

struct ResolveDiagnostics {
  double min_eigenvalue = 0.0;
  bool below_ridge = false;  // metric is (numerically) singular at this ridge
};

// pi = -(M + ridge I)^-1 f, metric passed through.
PolicyValue ResolvePolicy(const SpecValue& spec, double ridge = kDefaultRidge,
                          ResolveDiagnostics* diagnostics = nullptr);

// Metric = sum M_i, acceleration = (sum M_i + ridge I)^-1 sum M_i pi_i.
PolicyValue MetricWeightedAverage(std::span<const PolicyValue> terms,
                                  double ridge = kDefaultRidge);

// Natural form of a policy value: (M, -M pi).
SpecValue ToNaturalForm(const PolicyValue& policy);

// Solves (M + ridge I) y = b for symmetric PSD M.
Vec RidgeSolve(const Mat& metric, const Vec& rhs, double ridge = kDefaultRidge);

// RidgeSolve for b known to lie in the range of M, as with pulled-back
// policies. Eigen-directions of M below round-off relative to its largest
// eigenvalue count as null, so round-off in b along them is dropped instead of
// being amplified by 1 / ridge.
Vec RangeRidgeSolve(const Mat& metric, const Vec& rhs, double ridge = kDefaultRidge);

}  // namespace fabrics

#endif  // FABRICS_SPEC_ALGEBRA_H_
