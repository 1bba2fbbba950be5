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

// Acceleration-based potentials psi_1. Their negative gradients are used
// directly as acceleration policies.

#ifndef FABRICS_POTENTIALS_H_
#define FABRICS_POTENTIALS_H_

#include <functional>
#include <variant>

#include "fabrics/spec_algebra.h"

namespace fabrics {

// psi(x) = k (|x| + log(1 + exp(-2 a |x|)) / a). Smooth everywhere, with
// gradient k tanh(a |x|) x/|x| that saturates at k far from the origin.
struct SoftNormAttractor {
  double k = 10.0;
  double alpha_psi = 10.0;
};

// psi(x) = alpha_b / (c x^p), x > 0.
struct BarrierInversePower {
  double alpha_b = 1.0;
  double c = 2.0;
  double p = 8.0;
};

// psi(x) = a1 / x^2 + a2 log(exp(-a3 (x - a4)) + 1), x > 0 when a1 > 0.
struct LimitPotential {
  double alpha1 = 0.4;
  double alpha2 = 0.2;
  double alpha3 = 20.0;
  double alpha4 = 5.0;
};

using PotentialSpec = std::variant<SoftNormAttractor, BarrierInversePower, LimitPotential>;

// The 1-D families take a size-1 vector; barrier families throw
// BarrierDomainError for x <= 0.
double PotentialValue(const PotentialSpec& spec, const Vec& x);
Vec PotentialGradient(const PotentialSpec& spec, const Vec& x);

// Radial derivative of the soft-norm attractor: k tanh(a r).
double SoftNormSlope(const SoftNormAttractor& spec, double r);

// Scalar potential for a radially symmetric isotropic metric g(r) I paired
// with a radial acceleration potential: Psi(r) = int_0^r g(s) dpsi1(s) ds, so
// grad Psi = g(r) grad psi_1.
double IntegrateRadial(const std::function<double(double)>& g,
                       const std::function<double(double)>& dpsi1, double r);

// Same construction on (0, inf) for 1-D barriers, anchored at infinity:
// Psi(x) = -int_x^inf g(s) dpsi1(s) ds.
double IntegrateFromInfinity(const std::function<double(double)>& g,
                             const std::function<double(double)>& dpsi1, double x);

}  // namespace fabrics

#endif  // FABRICS_POTENTIALS_H_
