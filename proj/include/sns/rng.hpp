// Copyright 2026 The snsmpc Authors
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

#ifndef SNSMPC_RNG_HPP_
#define SNSMPC_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sns {

// Deterministic random stream. Wraps std::mt19937_64 but implements the
// real-valued transforms in-house so that a (seed, call sequence) pair yields
// the same bits on every standard library and platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi_inclusive) {
    const auto span = static_cast<std::uint64_t>(hi_inclusive - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  // Standard normal via Box-Muller (cosine branch). Two uniforms per draw,
  // no cached spare, so the stream position is call-count predictable.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Standard Cauchy via inverse CDF.
  double cauchy() {
    return std::tan(std::numbers::pi * (uniform() - 0.5));
  }

  double cauchy(double location, double scale) {
    return location + scale * cauchy();
  }

  // Independent substream, e.g. one per trajectory. splitmix64 of the pair
  // (seed, stream) so forks of forks stay decorrelated.
  Rng fork(std::uint64_t stream) const {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace sns

#endif  // SNSMPC_RNG_HPP_
