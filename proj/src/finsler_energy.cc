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

#include "fabrics/finsler_energy.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fabrics/errors.h"
#include "fabrics/random.h"

namespace fabrics {
namespace {

EnergyEval FromQuadratic(const Mat& metric, const Vec& xd, Vec curvature_force) {
  EnergyEval e;
  e.velocity_gradient = metric * xd;
  e.energy = 0.5 * xd.dot(e.velocity_gradient);
  e.tensor = metric;
  e.curvature_force = std::move(curvature_force);
  e.hamiltonian = xd.dot(e.velocity_gradient) - e.energy;
  return e;
}

}  // namespace

void FinslerEnergy::CheckDims(const Vec& x, const Vec& xd) const {
  if (x.size() != dim() || xd.size() != dim()) {
    throw DimensionError(fmt::format("{} energy of dim {} evaluated at dims {}/{}",
                                     family(), dim(), x.size(), xd.size()));
  }
}

EnergyEval EuclideanEnergy::Evaluate(const Vec& x, const Vec& xd) const {
  CheckDims(x, xd);
  return FromQuadratic(Mat::Identity(dim_, dim_), xd, Vec::Zero(dim_));
}

WeightedEuclideanEnergy::WeightedEuclideanEnergy(Mat weight) : weight_(std::move(weight)) {
  if (weight_.rows() != weight_.cols()) {
    throw DimensionError("weighted euclidean energy needs a square weight");
  }
  weight_ = 0.5 * (weight_ + weight_.transpose()).eval();
  if (!weight_.allFinite() || Eigen::LLT<Mat>(weight_).info() != Eigen::Success) {
    throw InvalidValueError("weighted euclidean energy needs a positive definite weight");
  }
}

EnergyEval WeightedEuclideanEnergy::Evaluate(const Vec& x, const Vec& xd) const {
  CheckDims(x, xd);
  return FromQuadratic(weight_, xd, Vec::Zero(dim()));
}

RiemannianEnergy::RiemannianEnergy(int dim, MetricField field, std::string label)
    : dim_(dim), field_(std::move(field)), label_(std::move(label)) {}

EnergyEval RiemannianEnergy::Evaluate(const Vec& x, const Vec& xd) const {
  CheckDims(x, xd);
  const MetricFieldEval g = field_(x);
  if (g.metric.rows() != dim_ || static_cast<int>(g.partials.size()) != dim_) {
    throw DimensionError(fmt::format("metric field '{}' returned wrong sizes", label_));
  }
  // f_e = sum_k xd_k (dG/dx_k) xd - 1/2 [xd^T (dG/dx_j) xd]_j
  Vec f = Vec::Zero(dim_);
  for (int k = 0; k < dim_; ++k) {
    const Vec gk_xd = g.partials[k] * xd;
    f += xd[k] * gk_xd;
    f[k] -= 0.5 * xd.dot(gk_xd);
  }
  return FromQuadratic(g.metric, xd, std::move(f));
}

GatedBarrierEnergy::GatedBarrierEnergy(double gain, double power, bool gated)
    : gain_(gain), power_(power), gated_(gated) {
  if (!(gain > 0.0)) throw InvalidValueError("barrier energy gain must be > 0");
}

double GatedBarrierEnergy::PositionMetric(double x) const {
  return gain_ * std::pow(x, -power_);
}

EnergyEval GatedBarrierEnergy::Evaluate(const Vec& x, const Vec& xd) const {
  CheckDims(x, xd);
  if (!(x[0] > 0.0)) throw BarrierDomainError("gated_barrier_1d", x[0]);
  const bool active = !gated_ || xd[0] < 0.0;
  if (!active) {
    EnergyEval e;
    e.velocity_gradient = Vec::Zero(1);
    e.tensor = Mat::Zero(1, 1);
    e.curvature_force = Vec::Zero(1);
    return e;
  }
  const double g = PositionMetric(x[0]);
  const double dg = -power_ * g / x[0];
  // Within the regime: f_e = dg xd^2 - 1/2 dg xd^2.
  Vec f(1);
  f[0] = 0.5 * dg * xd[0] * xd[0];
  return FromQuadratic(Mat::Constant(1, 1, g), xd, std::move(f));
}

ValidationReport ValidateFinsler(const FinslerEnergy& energy, int sample_count,
                                 std::uint64_t seed, double box) {
  if (sample_count < 1) throw InvalidValueError("sample_count must be >= 1");
  constexpr std::array<double, 4> kScales = {0.0, 0.5, 2.0, 10.0};
  constexpr double kHomogeneityTol = 1e-9;
  constexpr double kHd0Tol = 1e-9;
  constexpr int kMaxRejections = 10000;

  const int n = energy.dim();
  Sampler sampler(seed);
  ValidationReport report;
  report.min_eigenvalue = std::numeric_limits<double>::infinity();

  for (int s = 0; s < sample_count; ++s) {
    Vec x = sampler.UniformVec(n, -box, box);
    for (int tries = 0; !energy.InDomain(x); ++tries) {
      if (tries > kMaxRejections) throw InvalidValueError("cannot sample energy domain");
      x = sampler.UniformVec(n, -box, box);
    }
    Vec xd = sampler.UniformVec(n, -1.0, 1.0);
    if (xd.norm() < 1e-3) xd[0] = 1.0;

    const EnergyEval base = energy.Evaluate(x, xd);
    ++report.samples;

    if (!(base.energy > 0.0)) report.positivity = false;
    const EnergyEval rest = energy.Evaluate(x, Vec::Zero(n));
    if (rest.energy != 0.0) report.positivity = false;

    for (double scale : kScales) {
      const EnergyEval scaled = energy.Evaluate(x, scale * xd);
      const double expected = scale * scale * base.energy;
      const double err = std::abs(scaled.energy - expected);
      report.worst_homogeneity_error = std::max(report.worst_homogeneity_error, err);
      if (err > kHomogeneityTol * (1.0 + std::abs(expected))) report.homogeneity = false;
      if (scale > 0.0) {
        const double d = (scaled.tensor - base.tensor).norm();
        report.worst_hd0_error = std::max(report.worst_hd0_error, d);
        if (d > kHd0Tol * (1.0 + base.tensor.norm())) report.tensor_hd0 = false;
      }
    }

    const double min_eig =
        Eigen::SelfAdjointEigenSolver<Mat>(base.tensor, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .minCoeff();
    report.min_eigenvalue = std::min(report.min_eigenvalue, min_eig);
    if (!(min_eig > 0.0)) report.invertibility = false;
  }
  return report;
}

}  // namespace fabrics
