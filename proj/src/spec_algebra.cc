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

#include "fabrics/spec_algebra.h"

#include <string>

#include <fmt/format.h>

#include "fabrics/errors.h"

namespace fabrics {
namespace {

// Asymmetry beyond this is a bug upstream, not floating-point drift.
constexpr double kGrossAsymmetry = 1e-6;
constexpr double kPsdTol = 1e-10;
// Relative eigenvalue below which a metric direction is round-off.
constexpr double kRangeTol = 1e-13;

void CheckPsd(const Mat& m) {
  if (m.size() == 0) return;
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  // LDLT with pivoting is much cheaper than an eigen solve; its diagonal has
  // the same inertia as M.
  Eigen::LDLT<Mat> ldlt(m);
  const double min_d = ldlt.vectorD().minCoeff();
  if (min_d < -kPsdTol * scale) {
    throw InvalidValueError(
        fmt::format("spec metric is not PSD (pivot {:.3e}, scale {:.3e})",
                    min_d, scale));
  }
}

}  // namespace

SpecValue::SpecValue(Mat metric, Vec force)
    : metric_(std::move(metric)), force_(std::move(force)) {
  const auto n = force_.size();
  if (metric_.rows() != n || metric_.cols() != n) {
    throw DimensionError(fmt::format("spec metric is {}x{} but force has {} entries",
                                     metric_.rows(), metric_.cols(), n));
  }
  if (!metric_.allFinite() || !force_.allFinite()) {
    throw InvalidValueError("spec has non-finite entries");
  }
  if (n == 0) return;
  const double asym = (metric_ - metric_.transpose()).cwiseAbs().maxCoeff();
  const double scale = metric_.cwiseAbs().maxCoeff();
  if (asym > kGrossAsymmetry * std::max(1.0, scale)) {
    throw InvalidValueError(fmt::format("spec metric asymmetric by {:.3e}", asym));
  }
  metric_ = 0.5 * (metric_ + metric_.transpose()).eval();
  CheckPsd(metric_);
}

SpecValue::SpecValue(Mat metric, Vec force, Unchecked)
    : metric_(std::move(metric)), force_(std::move(force)) {
  if (metric_.rows() != force_.size() || metric_.cols() != force_.size()) {
    throw DimensionError("spec metric and force sizes differ");
  }
  if (!metric_.allFinite() || !force_.allFinite()) {
    throw InvalidValueError("spec has non-finite entries");
  }
  metric_ = 0.5 * (metric_ + metric_.transpose()).eval();
}

SpecValue SpecValue::FromPsdOperands(Mat metric, Vec force) {
  return SpecValue(std::move(metric), std::move(force), Unchecked{});
}

SpecValue SpecValue::Zero(int dim) {
  return SpecValue(Mat::Zero(dim, dim), Vec::Zero(dim));
}

void TaskMapEval::Validate() const {
  if (curvature.size() != jacobian.rows() || x.size() != jacobian.rows()) {
    throw InvalidValueError("task map evaluation has inconsistent sizes");
  }
  if (!x.allFinite() || !jacobian.allFinite() || !curvature.allFinite()) {
    throw InvalidValueError("task map evaluation has non-finite entries");
  }
}

SpecValue SumSpecs(const SpecValue& a, const SpecValue& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError(
        fmt::format("cannot sum specs of dims {} and {}", a.dim(), b.dim()));
  }
  return SpecValue::FromPsdOperands(a.metric() + b.metric(), a.force() + b.force());
}

SpecValue PullbackSpec(const SpecValue& spec, const TaskMapEval& tme,
                       CurvatureTransport transport) {
  if (spec.dim() != tme.child_dim()) {
    throw DimensionError(fmt::format(
        "pullback of a dim-{} spec through a map with child dim {}", spec.dim(),
        tme.child_dim()));
  }
  const Mat& J = tme.jacobian;
  Mat metric = J.transpose() * spec.metric() * J;
  Vec force = (transport == CurvatureTransport::kInclude)
                  ? Vec(J.transpose() * (spec.force() + spec.metric() * tme.curvature))
                  : Vec(J.transpose() * spec.force());
  return SpecValue::FromPsdOperands(std::move(metric), std::move(force));
}

Vec RidgeSolve(const Mat& metric, const Vec& rhs, double ridge) {
  const auto n = rhs.size();
  if (metric.rows() != n || metric.cols() != n) {
    throw DimensionError("ridge solve size mismatch");
  }
  if (n == 0) return Vec();
  Mat regularized = metric;
  regularized.diagonal().array() += ridge;
  Eigen::LLT<Mat> llt(regularized);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  // Only reachable when round-off pushes a PSD metric slightly negative.
  return regularized.completeOrthogonalDecomposition().solve(rhs);
}

Vec RangeRidgeSolve(const Mat& metric, const Vec& rhs, double ridge) {
  const auto n = rhs.size();
  if (metric.rows() != n || metric.cols() != n) {
    throw DimensionError("ridge solve size mismatch");
  }
  if (n == 0) return Vec();
  const Eigen::SelfAdjointEigenSolver<Mat> eig(metric);
  const Vec& lambda = eig.eigenvalues();
  const Mat& v = eig.eigenvectors();
  const double cutoff = kRangeTol * std::max(0.0, lambda.maxCoeff());
  Vec out = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (lambda[i] <= cutoff) continue;
    out += v.col(i) * (v.col(i).dot(rhs) / (lambda[i] + ridge));
  }
  return out;
}

PolicyValue ResolvePolicy(const SpecValue& spec, double ridge,
                          ResolveDiagnostics* diagnostics) {
  if (diagnostics != nullptr) {
    const double min_eig =
        spec.dim() == 0
            ? 0.0
            : Eigen::SelfAdjointEigenSolver<Mat>(spec.metric(), Eigen::EigenvaluesOnly)
                  .eigenvalues()
                  .minCoeff();
    diagnostics->min_eigenvalue = min_eig;
    diagnostics->below_ridge = min_eig < ridge;
  }
  return PolicyValue{spec.metric(), -RidgeSolve(spec.metric(), spec.force(), ridge)};
}

PolicyValue MetricWeightedAverage(std::span<const PolicyValue> terms, double ridge) {
  if (terms.empty()) {
    throw InvalidValueError("metric-weighted average of an empty term list");
  }
  const int n = terms.front().dim();
  Mat metric = Mat::Zero(n, n);
  Vec weighted = Vec::Zero(n);
  for (const PolicyValue& t : terms) {
    if (t.dim() != n || t.metric.rows() != n || t.metric.cols() != n) {
      throw DimensionError("metric-weighted average over mixed dimensions");
    }
    metric += t.metric;
    weighted += t.metric * t.acceleration;
  }
  Vec accel = RidgeSolve(metric, weighted, ridge);
  return PolicyValue{std::move(metric), std::move(accel)};
}

SpecValue ToNaturalForm(const PolicyValue& policy) {
  return SpecValue(policy.metric, -(policy.metric * policy.acceleration));
}

}  // namespace fabrics
