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

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sievestream/element.hpp"
#include "sievestream/errors.hpp"
#include "sievestream/objectives.hpp"

namespace sievestream {

// Wraps an objective and meters its use.
//
// Cost model: every set evaluation is one query. A call to eval() is one
// query and one adaptive round. A call to eval_batch() with q queries is q
// queries and exactly one round (the queries are mutually independent by
// caller contract; an empty batch costs nothing). marginal() issues its two
// evaluations in one round.
//
// The oracle optionally enforces a feasibility cap: queries over sets larger
// than the cap are rejected, matching the assumption that the function is
// evaluated only on feasible sets. Reference solvers (brute force, greedy)
// use the raw objective() view and never touch the counters.
class InstrumentedOracle {
 public:
  explicit InstrumentedOracle(const Objective& objective,
                              std::optional<std::size_t> feasibility_cap = {})
      : objective_(objective), feasibility_cap_(feasibility_cap) {}

  double eval(const ElementVec& set) {
    const double v = checked_value(set);
    query_count_.fetch_add(1, std::memory_order_relaxed);
    round_count_.fetch_add(1, std::memory_order_relaxed);
    return v;
  }

  std::vector<double> eval_batch(std::span<const ElementVec> queries) {
    std::vector<double> values;
    if (queries.empty()) return values;
    values.reserve(queries.size());
    for (const ElementVec& q : queries) {
      values.push_back(checked_value(q));
    }
    query_count_.fetch_add(queries.size(), std::memory_order_relaxed);
    round_count_.fetch_add(1, std::memory_order_relaxed);
    return values;
  }

  // f(S u {e}) - f(S); two independent evaluations, one round. Zero for
  // e already in S.
  double marginal(const Element* e, const ElementVec& set) {
    ElementVec with = set;
    if (!contains(set, e)) with.push_back(e);
    const double v_with = checked_value(with);
    const double v_base = checked_value(set);
    query_count_.fetch_add(2, std::memory_order_relaxed);
    round_count_.fetch_add(1, std::memory_order_relaxed);
    return v_with - v_base;
  }

  std::uint64_t query_count() const {
    return query_count_.load(std::memory_order_relaxed);
  }
  std::uint64_t round_count() const {
    return round_count_.load(std::memory_order_relaxed);
  }

  // Uninstrumented view for reference solvers and tests.
  const Objective& objective() const { return objective_; }
  std::optional<std::size_t> feasibility_cap() const {
    return feasibility_cap_;
  }

 private:
  double checked_value(const ElementVec& set) const {
    if (feasibility_cap_ && set.size() > *feasibility_cap_) {
      throw InvariantError("oracle: query of size " +
                           std::to_string(set.size()) +
                           " exceeds the feasibility cap " +
                           std::to_string(*feasibility_cap_));
    }
    if (!set.empty()) {
      const std::size_t variant = set[0]->payload.index();
      for (const Element* e : set) {
        if (e->payload.index() != variant) {
          throw InvariantError("oracle: mixed payload variants in one query");
        }
      }
    }
    const double v = objective_.value(set);
    if (v < -1e-9) {
      throw InvariantError("oracle: objective returned a negative value");
    }
    return v;
  }

  const Objective& objective_;
  std::optional<std::size_t> feasibility_cap_;
  mutable std::atomic<std::uint64_t> query_count_{0};
  mutable std::atomic<std::uint64_t> round_count_{0};
};

}  // namespace sievestream
