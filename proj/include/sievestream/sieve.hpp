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
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "sievestream/element.hpp"
#include "sievestream/errors.hpp"
#include "sievestream/grid.hpp"
#include "sievestream/oracle.hpp"

namespace sievestream {

inline void validate_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1)");
  }
}

enum class SieveVariant {
  kClassic,   // thresholds guess over [delta/(2k(1+eps)), delta]; no LB pruning
  kPlusPlus,  // tau_min = max(LB, delta)/(2k); LB prunes dead thresholds
};

// One-pass threshold sieving over a single stream. Each element costs one
// round for its singleton value and one round for the batched marginal
// tests against every non-full live bucket, so the adaptive depth is 2 per
// element.
class SieveStreaming {
 public:
  SieveStreaming(std::size_t k, double epsilon, SieveVariant variant)
      : k_(k), epsilon_(epsilon), variant_(variant), buckets_(1.0 + epsilon) {
    if (k == 0) throw ConfigError("k must be at least 1");
    validate_epsilon(epsilon);
  }

  void process(InstrumentedOracle& oracle, const Element& e) {
    const std::uint64_t q0 = oracle.query_count();
    const double base = 1.0 + epsilon_;

    const double singleton = oracle.eval({&e});
    if (singleton > delta_) delta_ = singleton;

    const double reference =
        variant_ == SieveVariant::kPlusPlus ? std::max(lb_, delta_) : delta_;
    tau_min_ = reference / (2.0 * static_cast<double>(k_));
    if (tau_min_ > 0.0) {
      buckets_.prune_below(ceil_exponent(base, tau_min_));
    }

    if (delta_ > 0.0) {
      const int lo = ceil_exponent(base, tau_min_ / base);
      const int hi = floor_exponent(base, delta_);
      std::vector<ThresholdBucket*> candidates;
      std::vector<ElementVec> queries;
      for (int i = lo; i <= hi; ++i) {
        ThresholdBucket& bucket = buckets_.ensure(i);
        if (bucket.members.size() >= k_) continue;
        ElementVec with = bucket.members;
        with.push_back(&e);
        candidates.push_back(&bucket);
        queries.push_back(std::move(with));
      }
      const std::vector<double> values = oracle.eval_batch(queries);
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        ThresholdBucket& bucket = *candidates[c];
        const double gain = values[c] - bucket.value;
        if (gain >= bucket.tau) {
          bucket.members.push_back(&e);
          bucket.value = values[c];
          buckets_.note_insertions(1);
          if (bucket.value > lb_) lb_ = bucket.value;
        }
      }
    }

    last_element_queries_ = oracle.query_count() - q0;
    if (last_element_queries_ > max_element_queries_) {
      max_element_queries_ = last_element_queries_;
    }
    ++elements_seen_;
  }

  // Members and cached value of the best bucket; (empty, 0) without buckets.
  std::pair<ElementVec, double> finalize() const {
    const ThresholdBucket* best = buckets_.best();
    if (best == nullptr) return {ElementVec{}, 0.0};
    return {best->members, best->value};
  }

  double delta() const { return delta_; }
  double lb() const { return lb_; }
  double tau_min() const { return tau_min_; }
  std::size_t stored_elements() const { return buckets_.stored(); }
  std::size_t peak_stored() const { return buckets_.peak_stored(); }
  std::vector<int> live_exponents() const { return buckets_.live_exponents(); }
  const BucketMap& buckets() const { return buckets_; }
  std::uint64_t last_element_queries() const { return last_element_queries_; }
  std::uint64_t max_element_queries() const { return max_element_queries_; }
  std::uint64_t elements_seen() const { return elements_seen_; }

 private:
  std::size_t k_;
  double epsilon_;
  SieveVariant variant_;
  BucketMap buckets_;
  double delta_ = 0.0;
  double lb_ = 0.0;
  double tau_min_ = 0.0;
  std::uint64_t last_element_queries_ = 0;
  std::uint64_t max_element_queries_ = 0;
  std::uint64_t elements_seen_ = 0;
};

// Single-solution swapping baseline: keep at most k elements; while below
// capacity accept anything with positive gain, and once full replace the
// weakest member when the swap improves the solution value by at least
// f(S)/k. At most k+1 queries and one round per element.
class PreemptionStreaming {
 public:
  PreemptionStreaming(std::size_t k, double /*epsilon*/) : k_(k) {
    if (k == 0) throw ConfigError("k must be at least 1");
  }

  void process(InstrumentedOracle& oracle, const Element& e) {
    const std::uint64_t q0 = oracle.query_count();
    if (members_.size() < k_) {
      ElementVec with = members_;
      with.push_back(&e);
      const double v = oracle.eval(with);
      if (v - value_ > 0.0) {
        members_ = std::move(with);
        value_ = v;
        if (members_.size() > peak_stored_) peak_stored_ = members_.size();
      }
    } else {
      std::vector<ElementVec> queries;
      queries.reserve(members_.size());
      for (std::size_t drop = 0; drop < members_.size(); ++drop) {
        ElementVec swapped;
        swapped.reserve(members_.size());
        for (std::size_t i = 0; i < members_.size(); ++i) {
          if (i != drop) swapped.push_back(members_[i]);
        }
        swapped.push_back(&e);
        queries.push_back(std::move(swapped));
      }
      const std::vector<double> values = oracle.eval_batch(queries);
      std::size_t best_drop = members_.size();
      double best_value = value_;
      for (std::size_t drop = 0; drop < members_.size(); ++drop) {
        if (values[drop] > best_value ||
            (best_drop < members_.size() && values[drop] == best_value &&
             members_[drop]->id < members_[best_drop]->id)) {
          best_value = values[drop];
          best_drop = drop;
        }
      }
      if (best_drop < members_.size() &&
          best_value - value_ >= value_ / static_cast<double>(k_)) {
        members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(best_drop));
        members_.push_back(&e);
        value_ = best_value;
      }
    }
    last_element_queries_ = oracle.query_count() - q0;
    if (last_element_queries_ > max_element_queries_) {
      max_element_queries_ = last_element_queries_;
    }
  }

  std::pair<ElementVec, double> finalize() const { return {members_, value_}; }

  std::size_t stored_elements() const { return members_.size(); }
  std::size_t peak_stored() const { return peak_stored_; }
  std::uint64_t max_element_queries() const { return max_element_queries_; }

 private:
  std::size_t k_;
  ElementVec members_;
  double value_ = 0.0;
  std::size_t peak_stored_ = 0;
  std::uint64_t last_element_queries_ = 0;
  std::uint64_t max_element_queries_ = 0;
};

}  // namespace sievestream
