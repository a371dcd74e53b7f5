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
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sievestream/element.hpp"
#include "sievestream/errors.hpp"
#include "sievestream/grid.hpp"
#include "sievestream/oracle.hpp"
#include "sievestream/rng.hpp"
#include "sievestream/sampling.hpp"
#include "sievestream/sieve.hpp"
#include "sievestream/trace.hpp"

namespace sievestream {

struct BufferConfig {
  std::size_t capacity = 100;
  double trigger_fraction = 0.8;

  std::size_t trigger_count() const {
    return static_cast<std::size_t>(
        std::ceil(static_cast<double>(capacity) * trigger_fraction));
  }

  void validate() const {
    if (capacity == 0) throw ConfigError("buffer capacity must be >= 1");
    if (!(trigger_fraction > 0.0) || trigger_fraction > 1.0) {
      throw ConfigError("trigger fraction must lie in (0, 1]");
    }
    if (trigger_count() < 1) {
      throw ConfigError("capacity * trigger fraction must round up to >= 1");
    }
  }
};

enum class InnerSampler {
  kThresholdSampling,  // geometric random batches, one test round per batch
  kSampleOne,          // one filter round, then one uniform survivor, repeated
};

// The buffered threshold frame: tau_min = max(LB, delta) / (2k(1+eps)), a
// grid of guesses over [tau_min, delta], and per-guess solutions grown by an
// inner sampler over the flushed buffers. LB is refreshed once per flush;
// the refresh of buckets whose cached value fell behind a size-capped batch
// rides along with the next flush's singleton round.
class BufferedSieveEngine {
 public:
  struct FlushStats {
    std::uint64_t transferred = 0;
    std::uint64_t wasted = 0;
    std::uint64_t insertions = 0;
    std::uint64_t sampler_iterations = 0;
    std::size_t peak_bucket_stored = 0;
  };

  BufferedSieveEngine(std::size_t k, double epsilon, InnerSampler sampler,
                      int ladder_width)
      : k_(k),
        epsilon_(epsilon),
        sampler_(sampler),
        ladder_width_(ladder_width),
        buckets_(1.0 + epsilon) {
    if (k == 0) throw ConfigError("k must be at least 1");
    validate_epsilon(epsilon);
    if (ladder_width < 1) throw ConfigError("R must be >= 1");
    if (sampler == InnerSampler::kSampleOne && ladder_width != 1) {
      throw ConfigError("sample-one has no ladder variant");
    }
  }

  FlushStats flush(InstrumentedOracle& oracle,
                   const std::vector<ElementVec>& machine_buffers,
                   std::uint64_t sampler_seed_root, std::uint64_t flush_index,
                   const TraceSink& sink = {}) {
    FlushStats stats;
    const double base = 1.0 + epsilon_;

    // Round 1: every buffered singleton, plus any stale bucket sets left
    // over from the previous flush's size-capped batches.
    {
      std::vector<ElementVec> queries;
      std::vector<ThresholdBucket*> stale;
      for (const ElementVec& buffer : machine_buffers) {
        for (const Element* e : buffer) queries.push_back(ElementVec{e});
      }
      const std::size_t singleton_count = queries.size();
      for (auto& [exp, bucket] : buckets_.all()) {
        if (bucket.stale) {
          queries.push_back(bucket.members);
          stale.push_back(&bucket);
        }
      }
      const std::vector<double> values = oracle.eval_batch(queries);
      for (std::size_t i = 0; i < singleton_count; ++i) {
        if (values[i] > delta_) delta_ = values[i];
      }
      for (std::size_t s = 0; s < stale.size(); ++s) {
        stale[s]->value = values[singleton_count + s];
        stale[s]->stale = false;
      }
    }
    refresh_lb();
    tau_min_ = std::max(lb_, delta_) /
               (2.0 * static_cast<double>(k_) * (1.0 + epsilon_));
    if (tau_min_ > 0.0) buckets_.prune_below(ceil_exponent(base, tau_min_));

    std::size_t peak_this_flush = buckets_.stored();
    if (delta_ > 0.0) {
      const int lo = ceil_exponent(base, tau_min_);
      const int hi = floor_exponent(base, delta_);
      if (sink) {
        sink("flush=" + std::to_string(flush_index) +
             " buffered=" + std::to_string(total_size(machine_buffers)) +
             " delta=" + format_double(delta_) +
             " lb=" + format_double(lb_) +
             " tau_min=" + format_double(tau_min_) + " grid=[" +
             std::to_string(lo) + "," + std::to_string(hi) + "]");
      }
      for (int i = lo; i <= hi; ++i) {
        ThresholdBucket& bucket = buckets_.ensure(i);
        if (bucket.members.size() >= k_) continue;
        BufferPools pools = machine_buffers;
        const std::uint64_t seed =
            derive_seed(sampler_seed_root, flush_index,
                        static_cast<std::uint64_t>(static_cast<std::int64_t>(i)));
        SamplingResult res;
        if (sampler_ == InnerSampler::kThresholdSampling) {
          res = threshold_sampling(oracle, bucket.members, pools,
                                   k_ - bucket.members.size(), bucket.tau,
                                   epsilon_, seed, ladder_width_,
                                   static_cast<bool>(sink));
        } else {
          res = sample_one(oracle, bucket.members, pools,
                           k_ - bucket.members.size(), bucket.tau, seed);
        }
        if (!res.picked.empty()) {
          bucket.members.insert(bucket.members.end(), res.picked.begin(),
                                res.picked.end());
          buckets_.note_insertions(res.picked.size());
          if (res.value_known) {
            bucket.value = res.final_value;
            bucket.stale = false;
          } else {
            bucket.stale = true;
          }
        }
        stats.transferred += res.transferred;
        stats.wasted += res.wasted;
        stats.insertions += res.picked.size();
        stats.sampler_iterations += res.while_iterations;
        if (buckets_.stored() > peak_this_flush) {
          peak_this_flush = buckets_.stored();
        }
        if (sink) {
          sink("flush=" + std::to_string(flush_index) +
               " bucket=" + std::to_string(i) + " tau=" +
               format_double(bucket.tau) +
               " picked=" + std::to_string(res.picked.size()) +
               " transferred=" + std::to_string(res.transferred) +
               " wasted=" + std::to_string(res.wasted));
          for (const TraceRow& row : res.trace) {
            sink("flush=" + std::to_string(flush_index) +
                 " bucket=" + std::to_string(i) + " " + format_trace_row(row));
          }
        }
      }
    }
    stats.peak_bucket_stored = peak_this_flush;
    ++flushes_;
    return stats;
  }

  // Brings every stale bucket cache up to date (at most one round).
  void refresh_values(InstrumentedOracle& oracle) {
    std::vector<ElementVec> queries;
    std::vector<ThresholdBucket*> stale;
    for (auto& [exp, bucket] : buckets_.all()) {
      if (bucket.stale) {
        queries.push_back(bucket.members);
        stale.push_back(&bucket);
      }
    }
    const std::vector<double> values = oracle.eval_batch(queries);
    for (std::size_t s = 0; s < stale.size(); ++s) {
      stale[s]->value = values[s];
      stale[s]->stale = false;
    }
    refresh_lb();
  }

  std::pair<ElementVec, double> best() const {
    const ThresholdBucket* best = buckets_.best();
    if (best == nullptr) return {ElementVec{}, 0.0};
    return {best->members, best->value};
  }

  double delta() const { return delta_; }
  double lb() const { return lb_; }
  double tau_min() const { return tau_min_; }
  std::size_t stored() const { return buckets_.stored(); }
  std::size_t peak_stored() const { return buckets_.peak_stored(); }
  std::uint64_t flushes() const { return flushes_; }
  const BucketMap& buckets() const { return buckets_; }
  std::size_t k() const { return k_; }
  double epsilon() const { return epsilon_; }

 private:
  static std::size_t total_size(const std::vector<ElementVec>& buffers) {
    std::size_t total = 0;
    for (const ElementVec& b : buffers) total += b.size();
    return total;
  }

  static std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
  }

  void refresh_lb() {
    // A stale cache is the value of a member prefix, still a feasible set.
    for (const auto& [exp, bucket] : buckets_.all()) {
      if (bucket.value > lb_) lb_ = bucket.value;
    }
  }

  // One filter round over the pools, then one uniform pick among the
  // survivors, repeated until the budget or the survivors run out. The
  // filter round already evaluated every candidate, so a pick costs no
  // extra query.
  SamplingResult sample_one(InstrumentedOracle& oracle, const ElementVec& base,
                            BufferPools& pools, std::size_t k_remaining,
                            double tau, std::uint64_t seed) {
    SamplingResult res;
    if (k_remaining == 0) return res;
    Rng rng(seed);
    ElementVec picked;
    double current = 0.0;
    while (picked.size() < k_remaining && pools_total(pools) > 0) {
      ++res.while_iterations;
      std::vector<ElementVec> queries;
      const ElementVec with_picked = detail::set_union(base, picked);
      for (const ElementVec& pool : pools) {
        for (const Element* x : pool) {
          ElementVec q = with_picked;
          q.push_back(x);
          queries.push_back(std::move(q));
        }
      }
      queries.push_back(with_picked);
      const std::vector<double> values = oracle.eval_batch(queries);
      current = values.back();
      std::unordered_map<const Element*, double> value_with;
      std::size_t idx = 0;
      for (ElementVec& pool : pools) {
        ElementVec survivors;
        for (const Element* x : pool) {
          if (values[idx] - current >= tau) {
            survivors.push_back(x);
            value_with[x] = values[idx];
          }
          ++idx;
        }
        pool = std::move(survivors);
      }
      if (pools_total(pools) == 0) break;
      const Element* x = detail::draw_from_pools(pools, rng);
      ++res.transferred;
      picked.push_back(x);
      current = value_with[x];
    }
    res.picked = std::move(picked);
    res.value_known = !res.picked.empty();
    res.final_value = current;
    return res;
  }

  std::size_t k_;
  double epsilon_;
  InnerSampler sampler_;
  int ladder_width_;
  BucketMap buckets_;
  double delta_ = 0.0;
  double lb_ = 0.0;
  double tau_min_ = 0.0;
  std::uint64_t flushes_ = 0;
};

// Single-machine buffered streaming: ingest into one bounded buffer and run
// the threshold frame whenever the trigger fraction fills, plus once more at
// end of stream so a short tail is never dropped.
class BufferedStreaming {
 public:
  BufferedStreaming(std::size_t k, double epsilon, BufferConfig config,
                    InnerSampler sampler, int ladder_width,
                    std::uint64_t master_seed, TraceSink sink = {})
      : engine_(k, epsilon, sampler, ladder_width),
        config_(config),
        sampler_seed_root_(derive_seed(master_seed, seed_label::kSampler)),
        sink_(std::move(sink)) {
    config_.validate();
  }

  void ingest(InstrumentedOracle& oracle, const Element& e) {
    if (closed_) throw InvariantError("ingest after stream close");
    if (buffer_.size() >= config_.capacity) {
      throw InvariantError("buffer overflow: trigger never fired");
    }
    buffer_.push_back(&e);
    note_peak();
    if (buffer_.size() >= config_.trigger_count()) flush_now(oracle);
  }

  void flush_now(InstrumentedOracle& oracle) {
    if (buffer_.empty()) return;
    const std::size_t fill = buffer_.size();
    const auto stats = engine_.flush(oracle, {buffer_}, sampler_seed_root_,
                                     engine_.flushes(), sink_);
    if (fill + stats.peak_bucket_stored > peak_memory_) {
      peak_memory_ = fill + stats.peak_bucket_stored;
    }
    buffer_.clear();
    transferred_ += stats.transferred;
    wasted_ += stats.wasted;
    insertions_ += stats.insertions;
    sampler_iterations_ += stats.sampler_iterations;
  }

  std::pair<ElementVec, double> finalize(InstrumentedOracle& oracle) {
    flush_now(oracle);
    engine_.refresh_values(oracle);
    closed_ = true;
    return engine_.best();
  }

  const BufferedSieveEngine& engine() const { return engine_; }
  std::size_t buffer_fill() const { return buffer_.size(); }
  std::size_t peak_memory() const { return peak_memory_; }
  std::uint64_t flushes() const { return engine_.flushes(); }
  std::uint64_t insertions() const { return insertions_; }
  std::uint64_t transferred() const { return transferred_; }
  std::uint64_t wasted() const { return wasted_; }
  std::uint64_t sampler_iterations() const { return sampler_iterations_; }

 private:
  void note_peak() {
    const std::size_t now = buffer_.size() + engine_.stored();
    if (now > peak_memory_) peak_memory_ = now;
  }

  BufferedSieveEngine engine_;
  BufferConfig config_;
  ElementVec buffer_;
  std::uint64_t sampler_seed_root_;
  TraceSink sink_;
  bool closed_ = false;
  std::size_t peak_memory_ = 0;
  std::uint64_t transferred_ = 0;
  std::uint64_t wasted_ = 0;
  std::uint64_t insertions_ = 0;
  std::uint64_t sampler_iterations_ = 0;
};

}  // namespace sievestream
