// Copyright 2025 The GASR Authors
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

#ifndef GASR_RNG_HPP_
#define GASR_RNG_HPP_

#include <cstdint>
#include <random>
#include <string>

namespace gasr {

// Deterministic RNG. The engine is std::mt19937_64 (bit-exact per the
// standard); the distributions are implemented here because the standard
// library's are not reproducible across implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t NextU64() { return gen_(); }

  // Uniform on [0, 1).
  double Uniform();
  // Uniform on [lo, hi).
  double Uniform(double lo, double hi);
  // Uniform integer on the closed range [lo, hi].
  int64_t UniformInt(int64_t lo, int64_t hi);
  // Box-Muller; one fresh pair of uniforms per call.
  double Gaussian(double mean, double stddev);

 private:
  std::mt19937_64 gen_;
};

// splitmix64-based seed derivation, used for per-record seed chains.
uint64_t DeriveSeed(uint64_t parent, uint64_t salt);
uint64_t DeriveSeed(uint64_t parent, const std::string& tag);

}  // namespace gasr

#endif  // GASR_RNG_HPP_
