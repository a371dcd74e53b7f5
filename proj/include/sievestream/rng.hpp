// Copyright 2026 The SieveStream Authors.
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

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace sievestream {

// Counter-based splitmix64 generator. Runs must replay bit-identically from
// a seed, so we avoid <random> distributions (their output is
// implementation-defined) and hand-roll the few draws we need.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t zone = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= zone) v = next_u64();
    return v % n;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // One standard normal draw (Box-Muller, second value discarded).
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k && j < n; ++j) {
      const std::size_t r = j + uniform_below(n - j);
      std::swap(pool[j], pool[r]);
      out.push_back(pool[j]);
    }
    return out;
  }

 private:
  std::uint64_t state_;
};

// Derives an independent sub-seed from a master seed and a label. Every
// randomized stage of a run (generator, interleaving, per-flush samplers)
// gets its own labelled stream so sub-runs replay independently.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t label,
                                 std::uint64_t index = 0) {
  Rng mixer(master ^ (label * 0xd1b54a32d192ed03ULL) ^
            (index * 0x9e6c63d0876a9ecdULL));
  mixer.next_u64();
  return mixer.next_u64();
}

// Labels for the documented seed fan-out.
namespace seed_label {
inline constexpr std::uint64_t kGenerator = 1;
inline constexpr std::uint64_t kInterleave = 2;
inline constexpr std::uint64_t kSampler = 3;
}  // namespace seed_label

}  // namespace sievestream
