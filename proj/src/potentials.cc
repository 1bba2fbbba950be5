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

#include "fabrics/potentials.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "fabrics/errors.h"

namespace fabrics {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

// log(1 + exp(z)) without overflow.
double Softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }
double Logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double Scalar(const Vec& x, const char* family) {
  if (x.size() != 1) throw DimensionError(std::string(family) + " potential is 1-D");
  return x[0];
}

}  // namespace

double SoftNormSlope(const SoftNormAttractor& spec, double r) {
  return spec.k * std::tanh(spec.alpha_psi * r);
}

double PotentialValue(const PotentialSpec& spec, const Vec& x) {
  return std::visit(
      Overloaded{
          [&](const SoftNormAttractor& s) {
            const double r = x.norm();
            return s.k * (r + std::log1p(std::exp(-2.0 * s.alpha_psi * r)) / s.alpha_psi);
          },
          [&](const BarrierInversePower& s) {
            const double v = Scalar(x, "barrier");
            if (!(v > 0.0)) throw BarrierDomainError("barrier_inverse_power", v);
            return s.alpha_b / (s.c * std::pow(v, s.p));
          },
          [&](const LimitPotential& s) {
            const double v = Scalar(x, "limit");
            if (s.alpha1 != 0.0 && !(v > 0.0)) throw BarrierDomainError("limit_potential", v);
            const double barrier = s.alpha1 == 0.0 ? 0.0 : s.alpha1 / (v * v);
            return barrier + s.alpha2 * Softplus(-s.alpha3 * (v - s.alpha4));
          }},
      spec);
}

Vec PotentialGradient(const PotentialSpec& spec, const Vec& x) {
  return std::visit(
      Overloaded{
          [&](const SoftNormAttractor& s) -> Vec {
            const double r = x.norm();
            if (r == 0.0) return Vec::Zero(x.size());
            return (SoftNormSlope(s, r) / r) * x;
          },
          [&](const BarrierInversePower& s) -> Vec {
            const double v = Scalar(x, "barrier");
            if (!(v > 0.0)) throw BarrierDomainError("barrier_inverse_power", v);
            return Vec::Constant(1, -s.p * s.alpha_b / (s.c * std::pow(v, s.p + 1.0)));
          },
          [&](const LimitPotential& s) -> Vec {
            const double v = Scalar(x, "limit");
            if (s.alpha1 != 0.0 && !(v > 0.0)) throw BarrierDomainError("limit_potential", v);
            const double barrier = s.alpha1 == 0.0 ? 0.0 : -2.0 * s.alpha1 / (v * v * v);
            return Vec::Constant(
                1, barrier - s.alpha2 * s.alpha3 * Logistic(-s.alpha3 * (v - s.alpha4)));
          }},
      spec);
}

double IntegrateRadial(const std::function<double(double)>& g,
                       const std::function<double(double)>& dpsi1, double r) {
  if (r <= 0.0) return 0.0;
  auto f = [&](double s) { return g(s) * dpsi1(s); };
  // Fixed-order Gauss on short panels, refined near the origin where the
  // soft-norm slope turns on.
  double total = 0.0;
  double a = 0.0;
  while (a < r) {
    const double width = a < 0.5 ? 0.125 : 0.5;
    const double b = std::min(r, a + width);
    total += boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
    a = b;
  }
  return total;
}

double IntegrateFromInfinity(const std::function<double(double)>& g,
                             const std::function<double(double)>& dpsi1, double x) {
  if (!(x > 0.0)) throw BarrierDomainError("barrier potential", x);
  auto f = [&](double s) { return -g(s) * dpsi1(s); };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, x, std::numeric_limits<double>::infinity());
}

}  // namespace fabrics
