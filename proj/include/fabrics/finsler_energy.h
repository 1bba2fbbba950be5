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

// Finsler energies L_e(x, xd) and their Euler-Lagrange quantities.
//
// All families share the convention L_e = 1/2 xd^T G(x, xd) xd. Evaluation
// returns the energy tensor M_e = d2L/dxd2, the curvature force
// f_e = (d2L/dxd dx) xd - dL/dx and the Hamiltonian H_e = xd^T dL/dxd - L.

#ifndef FABRICS_FINSLER_ENERGY_H_
#define FABRICS_FINSLER_ENERGY_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fabrics/spec_algebra.h"

namespace fabrics {

struct EnergyEval {
  double energy = 0.0;
  Vec velocity_gradient;  // dL/dxd
  Mat tensor;             // M_e
  Vec curvature_force;    // f_e
  double hamiltonian = 0.0;

  SpecValue spec() const { return SpecValue(tensor, curvature_force); }
};

class FinslerEnergy {
 public:
  virtual ~FinslerEnergy() = default;

  virtual int dim() const = 0;
  virtual std::string_view family() const = 0;
  virtual EnergyEval Evaluate(const Vec& x, const Vec& xd) const = 0;

  // Positions outside the domain (barrier side x <= 0) make Evaluate throw.
  virtual bool InDomain(const Vec& /*x*/) const { return true; }

 protected:
  void CheckDims(const Vec& x, const Vec& xd) const;
};

using EnergyPtr = std::shared_ptr<const FinslerEnergy>;

// L = 1/2 |xd|^2.
class EuclideanEnergy final : public FinslerEnergy {
 public:
  explicit EuclideanEnergy(int dim) : dim_(dim) {}
  int dim() const override { return dim_; }
  std::string_view family() const override { return "euclidean"; }
  EnergyEval Evaluate(const Vec& x, const Vec& xd) const override;

 private:
  int dim_;
};

// L = 1/2 xd^T G xd with constant SPD G.
class WeightedEuclideanEnergy final : public FinslerEnergy {
 public:
  explicit WeightedEuclideanEnergy(Mat weight);
  int dim() const override { return static_cast<int>(weight_.rows()); }
  std::string_view family() const override { return "weighted_euclidean"; }
  EnergyEval Evaluate(const Vec& x, const Vec& xd) const override;
  const Mat& weight() const { return weight_; }

 private:
  Mat weight_;
};

// Position-dependent metric G(x) with its partials dG/dx_k.
struct MetricFieldEval {
  Mat metric;
  std::vector<Mat> partials;  // one per coordinate of x
};
using MetricField = std::function<MetricFieldEval(const Vec& x)>;

// L = 1/2 xd^T G(x) xd.
class RiemannianEnergy final : public FinslerEnergy {
 public:
  RiemannianEnergy(int dim, MetricField field, std::string label = "riemannian");
  int dim() const override { return dim_; }
  std::string_view family() const override { return "riemannian"; }
  EnergyEval Evaluate(const Vec& x, const Vec& xd) const override;
  const std::string& label() const { return label_; }

 private:
  int dim_;
  MetricField field_;
  std::string label_;
};

// One-dimensional barrier energy L = 1/2 s(xd) g(x) xd^2, g(x) = gain / x^power.
// With `gated`, s(xd) = 1 iff xd < 0 and 0 otherwise (xd = 0 is gate-off);
// without it s = 1. Derivatives are taken inside the active regime.
class GatedBarrierEnergy final : public FinslerEnergy {
 public:
  GatedBarrierEnergy(double gain, double power, bool gated);
  int dim() const override { return 1; }
  std::string_view family() const override { return "gated_barrier_1d"; }
  EnergyEval Evaluate(const Vec& x, const Vec& xd) const override;
  bool InDomain(const Vec& x) const override { return x.size() == 1 && x[0] > 0.0; }

  double gain() const { return gain_; }
  double power() const { return power_; }
  bool gated() const { return gated_; }
  // g(x) without the velocity gate.
  double PositionMetric(double x) const;

 private:
  double gain_;
  double power_;
  bool gated_;
};

struct ValidationReport {
  bool positivity = true;
  bool homogeneity = true;     // L(x, l xd) = l^2 L(x, xd)
  bool invertibility = true;   // min eig M_e > 0
  bool tensor_hd0 = true;      // M_e(x, l xd) = M_e(x, xd), l > 0
  double worst_homogeneity_error = 0.0;
  double worst_hd0_error = 0.0;
  double min_eigenvalue = 0.0;
  int samples = 0;

  bool all_passed() const {
    return positivity && homogeneity && invertibility && tensor_hd0;
  }
};

// Checks the Finsler conditions on `sample_count` random states drawn with
// `seed`. Positions are drawn uniformly in [-box, box]^n (rejecting points
// outside the energy's domain), velocities uniformly in [-1, 1]^n.
ValidationReport ValidateFinsler(const FinslerEnergy& energy, int sample_count,
                                 std::uint64_t seed, double box = 2.0);

}  // namespace fabrics

#endif  // FABRICS_FINSLER_ENERGY_H_
