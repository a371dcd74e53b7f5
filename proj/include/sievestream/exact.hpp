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

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "sievestream/element.hpp"
#include "sievestream/errors.hpp"
#include "sievestream/objectives.hpp"

namespace sievestream {

struct ExactResult {
  ElementVec opt_set;
  double opt_value = 0.0;
};

namespace detail {

inline std::vector<std::uint64_t> sorted_ids(const ElementVec& s) {
  std::vector<std::uint64_t> ids;
  ids.reserve(s.size());
  for (const Element* e : s) ids.push_back(e->id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace detail

// Exhaustive optimum over all subsets of size <= k. Reference tool only: it
// evaluates the raw objective and never touches instrumentation. Ties are
// broken toward the lexicographically smallest id sequence.
inline ExactResult brute_force_opt(const Objective& objective,
                                   const std::vector<const Element*>& ground,
                                   std::size_t k) {
  constexpr std::size_t kMaxGround = 22;
  if (ground.size() > kMaxGround) {
    throw ConfigError("brute_force_opt: ground set of " +
                      std::to_string(ground.size()) +
                      " elements exceeds the enumeration cap of 22");
  }
  ExactResult best;
  best.opt_value = objective.value({});
  std::vector<std::uint64_t> best_ids;  // empty = the empty set, smallest
  const std::uint32_t n = static_cast<std::uint32_t>(ground.size());
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > k) continue;
    ElementVec subset;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (mask & (std::uint64_t{1} << i)) subset.push_back(ground[i]);
    }
    const double v = objective.value(subset);
    if (v > best.opt_value) {
      best.opt_value = v;
      best.opt_set = subset;
      best_ids = detail::sorted_ids(subset);
    } else if (v == best.opt_value) {
      auto ids = detail::sorted_ids(subset);
      if (std::lexicographical_compare(ids.begin(), ids.end(),
                                       best_ids.begin(), best_ids.end())) {
        best.opt_set = subset;
        best_ids = ids;
      }
    }
  }
  return best;
}

// Standard greedy: k rounds of best-marginal insertion, stopping early when
// no element has positive gain. Ties go to the smallest id. Uninstrumented.
inline ElementVec greedy(const Objective& objective,
                         const std::vector<const Element*>& ground,
                         std::size_t k) {
  ElementVec solution;
  double current = objective.value({});
  std::vector<bool> taken(ground.size(), false);
  for (std::size_t round = 0; round < k; ++round) {
    double best_gain = 0.0;
    std::size_t best_idx = ground.size();
    std::uint64_t best_id = 0;
    for (std::size_t i = 0; i < ground.size(); ++i) {
      if (taken[i]) continue;
      ElementVec with = solution;
      with.push_back(ground[i]);
      const double gain = objective.value(with) - current;
      if (best_idx == ground.size()) {
        if (gain <= 0.0) continue;
        best_gain = gain;
        best_idx = i;
        best_id = ground[i]->id;
      } else if (gain > best_gain ||
                 (gain == best_gain && ground[i]->id < best_id)) {
        best_gain = gain;
        best_idx = i;
        best_id = ground[i]->id;
      }
    }
    if (best_idx == ground.size()) break;
    taken[best_idx] = true;
    solution.push_back(ground[best_idx]);
    current += best_gain;
  }
  return solution;
}

}  // namespace sievestream
