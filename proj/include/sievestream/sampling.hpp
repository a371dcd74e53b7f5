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
#include <limits>
#include <utility>
#include <vector>

#include "sievestream/element.hpp"
#include "sievestream/errors.hpp"
#include "sievestream/grid.hpp"
#include "sievestream/oracle.hpp"
#include "sievestream/rng.hpp"
#include "sievestream/trace.hpp"

namespace sievestream {

// The candidate buffers the sampler consumes, one list per machine (a
// single-machine caller passes one pool). Filtering erases elements in
// place; drawing an element removes it permanently — in the multi-source
// model a drawn element has physically moved to the coordinator and is not
// returned.
using BufferPools = std::vector<ElementVec>;

inline std::size_t pools_total(const BufferPools& pools) {
  std::size_t total = 0;
  for (const ElementVec& p : pools) total += p.size();
  return total;
}

namespace detail {

// Uniform draw over the union of pools with removal. The coordinator only
// needs per-machine counts to pick a position, so the per-machine quotas of
// a batch are decided before any element moves.
inline const Element* draw_from_pools(BufferPools& pools, Rng& rng) {
  std::size_t r =
      static_cast<std::size_t>(rng.uniform_below(pools_total(pools)));
  for (ElementVec& pool : pools) {
    if (r < pool.size()) {
      const Element* e = pool[r];
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(r));
      return e;
    }
    r -= pool.size();
  }
  throw InvariantError("draw_from_pools: draw past the union size");
}

inline ElementVec set_union(const ElementVec& base, const ElementVec& extra) {
  ElementVec out = base;
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

}  // namespace detail

// ceil(1/eps) with a nudge against cases like 1/0.1 landing just above 10.
inline std::size_t ceil_one_over(double epsilon) {
  return static_cast<std::size_t>(std::ceil(1.0 / epsilon - 1e-9));
}

struct SamplingResult {
  ElementVec picked;              // insertion order
  double final_value = 0.0;       // f(base u picked) when value_known
  bool value_known = false;       // false after a size-check return
  std::uint64_t transferred = 0;  // elements drawn out of the pools
  std::uint64_t wasted = 0;       // ladder slots discarded (R > 1 only)
  std::uint64_t while_iterations = 0;
  std::vector<TraceRow> trace;
};

// Threshold sampler: alternates one-round buffer filtering with uniform
// random insertions whose average marginal gain is tested against
// (1-eps)*tau. `base` is the already-picked set the gains compose with; the
// budget is k_remaining further elements.
//
// With ladder_width == 1 this is the plain sampler: ceil(1/eps) single
// draws, then batches of floor((1+eps)^{i+1} - (1+eps)^i); a batch that
// reaches the budget returns before its test, and a failed test sends the
// loop back to the filter. Batch sizes that floor to zero are skipped.
//
// With ladder_width == R > 1, each batch step draws
// ceil((1+eps)^{i+R} - (1+eps)^i) elements at once and tests the R nested
// prefixes ceil((1+eps)^{i+j} - (1+eps)^i) in a single round, keeping the
// largest prefix whose predecessors all passed. The slots beyond the kept
// prefix are the step's wasted communication, and the loop refilters
// exactly when the kept prefix's own test failed.
inline SamplingResult threshold_sampling(InstrumentedOracle& oracle,
                                         const ElementVec& base,
                                         BufferPools& pools,
                                         std::size_t k_remaining, double tau,
                                         double epsilon,
                                         std::uint64_t rng_seed,
                                         int ladder_width = 1,
                                         bool record_trace = false) {
  if (!(tau > 0.0)) throw InvariantError("threshold_sampling: tau must be > 0");
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw ConfigError("threshold_sampling: epsilon must lie in (0, 1)");
  }
  if (ladder_width < 1) {
    throw ConfigError("threshold_sampling: ladder width must be >= 1");
  }

  SamplingResult res;
  if (k_remaining == 0) return res;

  Rng rng(rng_seed);
  const double b = 1.0 + epsilon;
  const double accept_bar = (1.0 - epsilon) * tau;
  const std::size_t singles = ceil_one_over(epsilon);
  const int ladder_lo = floor_exponent(b, 1.0 / epsilon);
  const int ladder_hi = ceil_exponent(b, static_cast<double>(k_remaining)) - 1;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ElementVec picked;  // grows into res.picked
  double current = 0.0;
  bool current_known = false;

  auto trace_row = [&](const char* step, std::uint64_t t, double avg,
                       bool accepted) {
    if (record_trace) {
      res.trace.push_back(
          TraceRow{res.while_iterations, step, t, avg, accepted});
    }
  };
  auto finish = [&](bool known) {
    res.picked = std::move(picked);
    res.value_known = known && !res.picked.empty();
    if (res.value_known) res.final_value = current;
    return std::move(res);
  };

  while (pools_total(pools) > 0 && picked.size() < k_remaining) {
    ++res.while_iterations;

    // Filter: one batched round over every buffered element.
    {
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
      current_known = true;
      std::size_t idx = 0;
      for (ElementVec& pool : pools) {
        ElementVec survivors;
        survivors.reserve(pool.size());
        for (const Element* x : pool) {
          if (values[idx] - current >= tau) survivors.push_back(x);
          ++idx;
        }
        pool = std::move(survivors);
      }
      trace_row("filter", pools_total(pools), nan, true);
    }
    if (pools_total(pools) == 0) continue;

    // First loop: up to ceil(1/eps) single uniform draws.
    bool refilter = false;
    for (std::size_t s = 0; s < singles; ++s) {
      if (pools_total(pools) == 0) {
        refilter = true;
        break;
      }
      const Element* x = detail::draw_from_pools(pools, rng);
      ++res.transferred;
      ElementVec with_x = detail::set_union(base, picked);
      with_x.push_back(x);
      const std::vector<ElementVec> queries = {
          with_x, detail::set_union(base, picked)};
      const std::vector<double> values = oracle.eval_batch(queries);
      const double gain = values[0] - values[1];
      if (gain > accept_bar) {
        picked.push_back(x);
        current = values[0];
        trace_row("single", 1, gain, true);
        if (picked.size() == k_remaining) return finish(true);
      } else {
        trace_row("single", 1, gain, false);
        refilter = true;
        break;
      }
    }
    if (refilter) continue;

    // Second loop: geometrically growing batches.
    if (ladder_width == 1) {
      for (int i = ladder_lo; i <= ladder_hi; ++i) {
        if (pools_total(pools) == 0) break;
        const double step_size = std::floor(tau_of(b, i + 1) - tau_of(b, i));
        std::size_t t = step_size <= 0.0
                            ? 0
                            : static_cast<std::size_t>(step_size);
        t = std::min({t, pools_total(pools), k_remaining - picked.size()});
        if (t == 0) continue;  // floor collapsed the step; singles cover it

        ElementVec batch;
        batch.reserve(t);
        for (std::size_t j = 0; j < t; ++j) {
          batch.push_back(detail::draw_from_pools(pools, rng));
        }
        res.transferred += t;

        if (picked.size() + t == k_remaining) {
          // Size check precedes the average test; the cached value is now
          // behind by this batch.
          picked.insert(picked.end(), batch.begin(), batch.end());
          trace_row("batch", t, nan, true);
          return finish(false);
        }

        ElementVec with_batch = detail::set_union(base, picked);
        with_batch.insert(with_batch.end(), batch.begin(), batch.end());
        const std::vector<ElementVec> queries = {
            with_batch, detail::set_union(base, picked)};
        const std::vector<double> values = oracle.eval_batch(queries);
        const double avg =
            (values[0] - values[1]) / static_cast<double>(t);
        picked.insert(picked.end(), batch.begin(), batch.end());
        current = values[0];
        if (avg <= accept_bar) {
          trace_row("batch", t, avg, false);
          refilter = true;
          break;
        }
        trace_row("batch", t, avg, true);
      }
    } else {
      const int r = ladder_width;
      for (int i = ladder_lo; i <= ladder_hi && !refilter; i += r) {
        if (pools_total(pools) == 0) break;
        const std::size_t cap =
            std::min(pools_total(pools), k_remaining - picked.size());
        // Nested prefix sizes, clamped at the cap; rungs beyond the first
        // clamped one are identical sets.
        std::vector<std::size_t> sizes;
        bool truncated = false;
        for (int j = 1; j <= r; ++j) {
          const double raw = std::ceil(tau_of(b, i + j) - tau_of(b, i));
          std::size_t sj = static_cast<std::size_t>(raw);
          if (sj >= cap) {
            sj = cap;
            truncated = truncated || raw > static_cast<double>(cap);
          }
          sizes.push_back(sj);
          if (sj == cap) break;
        }
        const std::size_t rungs = sizes.size();
        const std::size_t drawn_count = sizes.back();

        ElementVec batch;
        batch.reserve(drawn_count);
        for (std::size_t j = 0; j < drawn_count; ++j) {
          batch.push_back(detail::draw_from_pools(pools, rng));
        }
        res.transferred += drawn_count;

        // All prefix gains in one round.
        std::vector<ElementVec> queries;
        queries.push_back(detail::set_union(base, picked));
        for (std::size_t j = 0; j < rungs; ++j) {
          ElementVec q = queries[0];
          q.insert(q.end(), batch.begin(),
                   batch.begin() + static_cast<std::ptrdiff_t>(sizes[j]));
          queries.push_back(std::move(q));
        }
        const std::vector<double> values = oracle.eval_batch(queries);
        std::vector<double> avg(rungs);
        for (std::size_t j = 0; j < rungs; ++j) {
          avg[j] = (values[j + 1] - values[0]) / static_cast<double>(sizes[j]);
        }

        // Keep the largest prefix whose predecessors all passed.
        std::size_t keep = 0;  // 0-based rung index
        while (keep + 1 < rungs && avg[keep] > accept_bar) ++keep;

        picked.insert(picked.end(), batch.begin(),
                      batch.begin() + static_cast<std::ptrdiff_t>(sizes[keep]));
        current = values[keep + 1];
        const bool kept_all_rungs = (keep + 1 == static_cast<std::size_t>(r));
        if (!kept_all_rungs) {
          if (!truncated && rungs == static_cast<std::size_t>(r)) {
            res.wasted += static_cast<std::uint64_t>(
                std::ceil(tau_of(b, i + r) - tau_of(b, i + 1 + static_cast<int>(keep))));
          } else {
            res.wasted += drawn_count - sizes[keep];
          }
        }
        trace_row("ladder", drawn_count, avg[keep], avg[keep] > accept_bar);
        if (picked.size() == k_remaining) return finish(true);
        if (avg[keep] <= accept_bar) refilter = true;
      }
    }
  }
  return finish(current_known);
}

}  // namespace sievestream
