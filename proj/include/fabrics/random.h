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

#ifndef FABRICS_RANDOM_H_
#define FABRICS_RANDOM_H_

#include <cstdint>
#include <random>

#include "fabrics/spec_algebra.h"

namespace fabrics {

// Seeded sampler with a platform-independent double conversion (std::
// distributions differ across standard libraries; mt19937_64 does not).
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double Unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Unit(); }

  Vec UniformVec(int n, double lo, double hi) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = Uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fabrics

#endif  // FABRICS_RANDOM_H_
