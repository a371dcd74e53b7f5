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
#include <map>
#include <vector>

#include "sievestream/element.hpp"

namespace sievestream {

// Threshold guesses live on the geometric grid tau = (1+eps)^i. Buckets are
// keyed by the integer exponent i and tau is always recomputed from it, so
// a moving tau_min never runs into float-equality trouble. The log/pow
// round-trips below are nudged so exact grid points land on their own
// exponent.
inline constexpr double kGridRelTol = 1e-12;

inline double tau_of(double base, int exponent) {
  return std::pow(base, exponent);
}

// Largest i with base^i <= x (within relative tolerance). x must be > 0.
inline int floor_exponent(double base, double x) {
  int i = static_cast<int>(std::floor(std::log(x) / std::log(base)));
  while (tau_of(base, i + 1) <= x * (1.0 + kGridRelTol)) ++i;
  while (tau_of(base, i) > x * (1.0 + kGridRelTol)) --i;
  return i;
}

// Smallest i with base^i >= x (within relative tolerance). x must be > 0.
inline int ceil_exponent(double base, double x) {
  int i = static_cast<int>(std::ceil(std::log(x) / std::log(base)));
  while (tau_of(base, i - 1) >= x * (1.0 - kGridRelTol)) --i;
  while (tau_of(base, i) < x * (1.0 - kGridRelTol)) ++i;
  return i;
}

// One threshold guess and its partial solution.
struct ThresholdBucket {
  int exponent = 0;
  double tau = 0.0;  // == tau_of(base, exponent)
  ElementVec members;
  double value = 0.0;  // cached f(members)
  bool stale = false;  // value cache behind by the last batch insertion
};

// The bucket collection shared by the sieve-style algorithms. Iteration is
// in ascending exponent order.
class BucketMap {
 public:
  explicit BucketMap(double base) : base_(base) {}

  ThresholdBucket& ensure(int exponent) {
    auto it = buckets_.find(exponent);
    if (it == buckets_.end()) {
      ThresholdBucket b;
      b.exponent = exponent;
      b.tau = tau_of(base_, exponent);
      it = buckets_.emplace(exponent, std::move(b)).first;
    }
    return it->second;
  }

  // Drops every bucket with exponent < min_exponent (i.e. tau < tau_min).
  void prune_below(int min_exponent) {
    auto it = buckets_.begin();
    while (it != buckets_.end() && it->first < min_exponent) {
      stored_ -= it->second.members.size();
      it = buckets_.erase(it);
    }
  }

  void note_insertions(std::size_t count) {
    stored_ += count;
    if (stored_ > peak_stored_) peak_stored_ = stored_;
  }

  // Best bucket by cached value; ties go to the smallest exponent.
  const ThresholdBucket* best() const {
    const ThresholdBucket* best = nullptr;
    for (const auto& [exp, bucket] : buckets_) {
      if (best == nullptr || bucket.value > best->value) best = &bucket;
    }
    return best;
  }

  std::size_t stored() const { return stored_; }
  std::size_t peak_stored() const { return peak_stored_; }
  bool empty() const { return buckets_.empty(); }
  std::map<int, ThresholdBucket>& all() { return buckets_; }
  const std::map<int, ThresholdBucket>& all() const { return buckets_; }

  std::vector<int> live_exponents() const {
    std::vector<int> out;
    out.reserve(buckets_.size());
    for (const auto& [exp, bucket] : buckets_) out.push_back(exp);
    return out;
  }

 private:
  double base_;
  std::map<int, ThresholdBucket> buckets_;
  std::size_t stored_ = 0;
  std::size_t peak_stored_ = 0;
};

}  // namespace sievestream
