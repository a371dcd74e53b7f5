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

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sievestream/element.hpp"
#include "sievestream/errors.hpp"
#include "sievestream/hybrid.hpp"
#include "sievestream/metrics.hpp"
#include "sievestream/oracle.hpp"
#include "sievestream/rng.hpp"
#include "sievestream/trace.hpp"

namespace sievestream {

enum class Interleave {
  kRoundRobin,     // one element per live source per tick
  kSeededRandom,   // each tick feeds one uniformly chosen live source
};

struct MultiSourceOptions {
  std::size_t k = 1;
  double epsilon = 0.5;
  BufferConfig buffer;
  int ladder_width = 1;  // R; > 1 trades communication for adaptivity
  std::uint64_t seed = 0;
  Interleave interleave = Interleave::kRoundRobin;
};

struct MultiSourceOutcome {
  ElementVec solution;
  double value = 0.0;
  RunMetrics metrics;  // wall_ms left to the caller
  std::uint64_t bucket_insertions = 0;
  std::uint64_t flushes = 0;
  double delta0 = 0.0;  // largest singleton at the first trigger
};

// Logical-time simulation of m buffered stream machines feeding one
// coordinator. Machine buffers fill in interleaved order; when any machine
// reaches the trigger fill the coordinator runs the threshold frame with the
// union of all buffers as the sampler's pools, then every buffer clears.
// Filtering is machine-local and costs rounds only; `communication` counts
// each element drawn out of a machine, kept or not. Thresholds and partial
// solutions live in shared memory and are never counted.
inline MultiSourceOutcome multisource_run(
    InstrumentedOracle& oracle,
    const std::vector<std::vector<const Element*>>& sources,
    const MultiSourceOptions& options, const TraceSink& sink = {}) {
  if (sources.empty()) throw ConfigError("multisource: empty source list");
  options.buffer.validate();
  {
    std::optional<std::size_t> variant;
    for (const auto& src : sources) {
      if (src.empty()) continue;
      const std::size_t v = src.front()->payload.index();
      if (variant && *variant != v) {
        throw DataError("multisource: payload variants differ across sources");
      }
      variant = v;
    }
  }

  const std::size_t m = sources.size();
  const std::uint64_t q0 = oracle.query_count();
  const std::uint64_t r0 = oracle.round_count();

  BufferedSieveEngine engine(options.k, options.epsilon,
                             InnerSampler::kThresholdSampling,
                             options.ladder_width);
  const std::uint64_t sampler_root =
      derive_seed(options.seed, seed_label::kSampler);
  Rng interleave_rng(derive_seed(options.seed, seed_label::kInterleave));

  std::vector<ElementVec> buffers(m);
  std::vector<std::size_t> cursor(m, 0);
  MultiSourceOutcome out;
  std::uint64_t peak = 0;
  const std::size_t trigger = options.buffer.trigger_count();

  auto total_fill = [&]() {
    std::size_t fill = 0;
    for (const ElementVec& b : buffers) fill += b.size();
    return fill;
  };
  auto note_peak = [&](std::size_t extra_bucket_peak) {
    const std::uint64_t now = total_fill() + extra_bucket_peak;
    if (now > peak) peak = now;
  };

  auto run_flush = [&](std::size_t trigger_machine) {
    if (total_fill() == 0) return;
    if (sink) {
      sink("trigger machine=" + std::to_string(trigger_machine) +
           " fill=" + std::to_string(total_fill()));
    }
    const auto stats = engine.flush(oracle, buffers, sampler_root,
                                    engine.flushes(), sink);
    if (out.flushes == 0) out.delta0 = engine.delta();
    note_peak(stats.peak_bucket_stored);
    out.metrics.communication += stats.transferred;
    out.metrics.wasted_communication += stats.wasted;
    out.bucket_insertions += stats.insertions;
    ++out.flushes;
    for (ElementVec& b : buffers) b.clear();
  };

  auto feed = [&](std::size_t machine) {
    const Element* e = sources[machine][cursor[machine]++];
    if (buffers[machine].size() >= options.buffer.capacity) {
      throw InvariantError("multisource: buffer overflow on machine " +
                           std::to_string(machine));
    }
    buffers[machine].push_back(e);
    note_peak(engine.stored());
    if (buffers[machine].size() >= trigger) run_flush(machine);
  };

  if (options.interleave == Interleave::kRoundRobin) {
    bool any = true;
    while (any) {
      any = false;
      for (std::size_t i = 0; i < m; ++i) {
        if (cursor[i] < sources[i].size()) {
          feed(i);
          any = true;
        }
      }
    }
  } else {
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < m; ++i) {
      if (cursor[i] < sources[i].size()) live.push_back(i);
    }
    while (!live.empty()) {
      const std::size_t pick = static_cast<std::size_t>(
          interleave_rng.uniform_below(live.size()));
      const std::size_t machine = live[pick];
      feed(machine);
      if (cursor[machine] >= sources[machine].size()) {
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(pick));
      }
    }
  }

  run_flush(m);  // terminal partial flush, if anything is still buffered
  engine.refresh_values(oracle);
  auto [solution, value] = engine.best();
  out.solution = std::move(solution);
  out.value = value;
  out.metrics.utility = value;
  out.metrics.peak_memory = peak;
  out.metrics.queries = oracle.query_count() - q0;
  out.metrics.adaptive_rounds = oracle.round_count() - r0;
  return out;
}

}  // namespace sievestream
