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

#include "gasr/rng.hpp"

#include <cmath>

#include "gasr/common.hpp"

namespace gasr {

double Rng::Uniform() {
  // 53 random bits, exact in a double.
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::Uniform(double lo, double hi) {
  return lo + (hi - lo) * Uniform();
}

int64_t Rng::UniformInt(int64_t lo, int64_t hi) {
  if (hi < lo) throw Error("UniformInt: empty range");
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<int64_t>(gen_());  // full 64-bit range
  // Rejection sampling keeps the draw unbiased and the stream stable.
  uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  uint64_t r;
  do {
    r = gen_();
  } while (r >= limit);
  return lo + static_cast<int64_t>(r % span);
}

double Rng::Gaussian(double mean, double stddev) {
  // Box-Muller, cosine branch only so each call consumes exactly two draws.
  double u1 = Uniform();
  double u2 = Uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  double z = std::sqrt(-2.0 * std::log(u1)) *
             std::cos(2.0 * M_PI * u2);
  return mean + stddev * z;
}

static uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t DeriveSeed(uint64_t parent, uint64_t salt) {
  return SplitMix64(parent ^ SplitMix64(salt));
}

uint64_t DeriveSeed(uint64_t parent, const std::string& tag) {
  return DeriveSeed(parent, Fnv1a64(tag));
}

}  // namespace gasr
