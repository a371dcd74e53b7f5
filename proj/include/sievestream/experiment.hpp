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

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sievestream/datasets.hpp"
#include "sievestream/element.hpp"
#include "sievestream/errors.hpp"
#include "sievestream/exact.hpp"
#include "sievestream/hybrid.hpp"
#include "sievestream/metrics.hpp"
#include "sievestream/multisource.hpp"
#include "sievestream/objectives.hpp"
#include "sievestream/oracle.hpp"
#include "sievestream/rng.hpp"
#include "sievestream/sieve.hpp"
#include "sievestream/trace.hpp"

namespace sievestream {

enum class Algorithm {
  kSieve,
  kSievePP,
  kPreemption,
  kBatchSievePP,
  kSampleOne,
  kMultisource,
  kTradeoff,
  kGreedy,
  kBrute,
};

enum class ObjectiveKind { kKeywords, kLogDet, kCoverage, kModular };

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kSieve: return "sieve";
    case Algorithm::kSievePP: return "sievepp";
    case Algorithm::kPreemption: return "preemption";
    case Algorithm::kBatchSievePP: return "batch_sievepp";
    case Algorithm::kSampleOne: return "sample_one";
    case Algorithm::kMultisource: return "multisource";
    case Algorithm::kTradeoff: return "tradeoff";
    case Algorithm::kGreedy: return "greedy";
    case Algorithm::kBrute: return "brute";
  }
  return "?";
}

inline const char* objective_name(ObjectiveKind o) {
  switch (o) {
    case ObjectiveKind::kKeywords: return "keywords";
    case ObjectiveKind::kLogDet: return "logdet";
    case ObjectiveKind::kCoverage: return "coverage";
    case ObjectiveKind::kModular: return "modular";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
  for (Algorithm a :
       {Algorithm::kSieve, Algorithm::kSievePP, Algorithm::kPreemption,
        Algorithm::kBatchSievePP, Algorithm::kSampleOne,
        Algorithm::kMultisource, Algorithm::kTradeoff, Algorithm::kGreedy,
        Algorithm::kBrute}) {
    if (s == algorithm_name(a)) return a;
  }
  throw ConfigError("unknown algorithm '" + s + "'");
}

inline ObjectiveKind parse_objective(const std::string& s) {
  for (ObjectiveKind o : {ObjectiveKind::kKeywords, ObjectiveKind::kLogDet,
                          ObjectiveKind::kCoverage, ObjectiveKind::kModular}) {
    if (s == objective_name(o)) return o;
  }
  throw ConfigError("unknown objective '" + s + "'");
}

inline GeneratorKind parse_generator_kind(const std::string& s) {
  if (s == "zipf_tweets") return GeneratorKind::kZipfTweets;
  if (s == "gaussian_vectors") return GeneratorKind::kGaussianVectors;
  if (s == "planted_coverage") return GeneratorKind::kPlantedCoverage;
  if (s == "modular") return GeneratorKind::kModular;
  throw ConfigError("unknown generator kind '" + s + "'");
}

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kSievePP;
  ObjectiveKind objective = ObjectiveKind::kModular;
  std::size_t k = 1;
  double epsilon = 0.1;
  std::size_t capacity = 100;
  double trigger = 0.8;
  std::size_t m = 1;
  int R = 1;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  std::string dataset_path;  // exactly one of path / generator
  std::optional<GeneratorSpec> generator;
  Interleave interleave = Interleave::kRoundRobin;
};

inline ObjectiveKind objective_for_generator(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kZipfTweets: return ObjectiveKind::kKeywords;
    case GeneratorKind::kGaussianVectors: return ObjectiveKind::kLogDet;
    case GeneratorKind::kPlantedCoverage: return ObjectiveKind::kCoverage;
    case GeneratorKind::kModular: return ObjectiveKind::kModular;
  }
  return ObjectiveKind::kModular;
}

inline bool is_multisource(Algorithm a) {
  return a == Algorithm::kMultisource || a == Algorithm::kTradeoff;
}

inline bool is_buffered(Algorithm a) {
  return a == Algorithm::kBatchSievePP || a == Algorithm::kSampleOne ||
         is_multisource(a);
}

inline void validate(const ExperimentConfig& c) {
  if (c.k < 1) throw ConfigError("k must be >= 1");
  if (!(c.epsilon > 0.0) || !(c.epsilon < 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1)");
  }
  if (c.R < 1) throw ConfigError("R must be >= 1");
  if (c.R != 1 && c.algorithm != Algorithm::kTradeoff) {
    throw ConfigError("R is only meaningful for the tradeoff algorithm");
  }
  if (!(c.alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (c.m > 1 && !is_multisource(c.algorithm)) {
    throw ConfigError("m > 1 requires a multisource algorithm");
  }
  if (is_multisource(c.algorithm) && c.m < 1) {
    throw ConfigError("multisource runs need m >= 1");
  }
  if (is_buffered(c.algorithm)) {
    BufferConfig{c.capacity, c.trigger}.validate();
  }
  const bool has_path = !c.dataset_path.empty();
  const bool has_gen = c.generator.has_value();
  if (has_path == has_gen) {
    throw ConfigError("provide exactly one of dataset path or generator");
  }
  if (has_gen) {
    if (c.generator->n == 0) throw ConfigError("generator n must be >= 1");
    const ObjectiveKind expect = objective_for_generator(c.generator->kind);
    if (expect != c.objective) {
      throw ConfigError(std::string("generator kind produces '") +
                        objective_name(expect) + "' payloads, not '" +
                        objective_name(c.objective) + "'");
    }
  }
  if (has_path) {
    if (c.objective == ObjectiveKind::kCoverage ||
        c.objective == ObjectiveKind::kModular) {
      throw ConfigError(
          "file datasets carry keyword or vector payloads; coverage/modular "
          "instances come from generators");
    }
  }
}

inline Dataset resolve_dataset(const ExperimentConfig& c) {
  if (c.generator) {
    GeneratorSpec spec = *c.generator;
    spec.seed = derive_seed(c.seed, seed_label::kGenerator);
    if (is_multisource(c.algorithm)) spec.sources = c.m;
    return generate(spec);
  }
  const bool jsonl = c.dataset_path.size() >= 6 &&
                     c.dataset_path.substr(c.dataset_path.size() - 6) ==
                         ".jsonl";
  Dataset ds = jsonl ? load_tweets(c.dataset_path)
                     : load_vectors(c.dataset_path);
  const ObjectiveKind loaded =
      jsonl ? ObjectiveKind::kKeywords : ObjectiveKind::kLogDet;
  if (loaded != c.objective) {
    throw ConfigError(std::string("dataset provides '") +
                      objective_name(loaded) + "' payloads, not '" +
                      objective_name(c.objective) + "'");
  }
  return ds;
}

inline std::unique_ptr<Objective> make_objective(const ExperimentConfig& c,
                                                 const Dataset& ds) {
  switch (c.objective) {
    case ObjectiveKind::kKeywords:
      return std::make_unique<KeywordCoverageObjective>();
    case ObjectiveKind::kLogDet:
      return std::make_unique<LogDetObjective>(c.alpha);
    case ObjectiveKind::kCoverage:
      return std::make_unique<WeightedCoverageObjective>(ds.coverage_weights);
    case ObjectiveKind::kModular:
      return std::make_unique<ModularObjective>();
  }
  throw ConfigError("unreachable objective kind");
}

// Splits the ground set into per-source streams, preserving arrival order.
// The source field decides the partition; an explicit m > 1 regroups by
// source % m.
inline std::vector<std::vector<const Element*>> partition_sources(
    const std::vector<Element>& elements, std::size_t m) {
  std::map<std::uint32_t, std::vector<const Element*>> groups;
  for (const Element& e : elements) {
    const std::uint32_t key =
        m > 1 ? static_cast<std::uint32_t>(e.source % m) : e.source;
    groups[key].push_back(&e);
  }
  std::vector<std::vector<const Element*>> out;
  out.reserve(groups.size());
  for (auto& [key, group] : groups) out.push_back(std::move(group));
  return out;
}

struct RunOutcome {
  RunMetrics metrics;
  ElementVec solution;
  std::size_t n = 0;
  std::size_t m_used = 1;  // stream count the run actually saw
};

inline RunOutcome run_experiment(const ExperimentConfig& config,
                                 const TraceSink& sink = {}) {
  validate(config);
  const Dataset dataset = resolve_dataset(config);
  const std::unique_ptr<Objective> objective =
      make_objective(config, dataset);

  RunOutcome out;
  out.n = dataset.elements.size();
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<const Element*> ground;
  ground.reserve(dataset.elements.size());
  for (const Element& e : dataset.elements) ground.push_back(&e);

  switch (config.algorithm) {
    case Algorithm::kGreedy: {
      const ElementVec sol = greedy(*objective, ground, config.k);
      out.solution = sol;
      out.metrics.utility = objective->value(sol);
      break;
    }
    case Algorithm::kBrute: {
      const ExactResult res = brute_force_opt(*objective, ground, config.k);
      out.solution = res.opt_set;
      out.metrics.utility = res.opt_value;
      break;
    }
    case Algorithm::kSieve:
    case Algorithm::kSievePP: {
      InstrumentedOracle oracle(*objective, config.k);
      SieveStreaming sieve(config.k, config.epsilon,
                           config.algorithm == Algorithm::kSieve
                               ? SieveVariant::kClassic
                               : SieveVariant::kPlusPlus);
      for (const Element* e : ground) sieve.process(oracle, *e);
      auto [sol, value] = sieve.finalize();
      out.solution = std::move(sol);
      out.metrics.utility = value;
      out.metrics.peak_memory = sieve.peak_stored();
      out.metrics.queries = oracle.query_count();
      out.metrics.adaptive_rounds = oracle.round_count();
      break;
    }
    case Algorithm::kPreemption: {
      InstrumentedOracle oracle(*objective, config.k);
      PreemptionStreaming preemption(config.k, config.epsilon);
      for (const Element* e : ground) preemption.process(oracle, *e);
      auto [sol, value] = preemption.finalize();
      out.solution = std::move(sol);
      out.metrics.utility = value;
      out.metrics.peak_memory = preemption.peak_stored();
      out.metrics.queries = oracle.query_count();
      out.metrics.adaptive_rounds = oracle.round_count();
      break;
    }
    case Algorithm::kBatchSievePP:
    case Algorithm::kSampleOne: {
      InstrumentedOracle oracle(*objective, config.k);
      BufferedStreaming buffered(
          config.k, config.epsilon, BufferConfig{config.capacity, config.trigger},
          config.algorithm == Algorithm::kBatchSievePP
              ? InnerSampler::kThresholdSampling
              : InnerSampler::kSampleOne,
          1, config.seed, sink);
      for (const Element* e : ground) buffered.ingest(oracle, *e);
      auto [sol, value] = buffered.finalize(oracle);
      out.solution = std::move(sol);
      out.metrics.utility = value;
      out.metrics.peak_memory = buffered.peak_memory();
      out.metrics.queries = oracle.query_count();
      out.metrics.adaptive_rounds = oracle.round_count();
      break;
    }
    case Algorithm::kMultisource:
    case Algorithm::kTradeoff: {
      InstrumentedOracle oracle(*objective, config.k);
      MultiSourceOptions options;
      options.k = config.k;
      options.epsilon = config.epsilon;
      options.buffer = BufferConfig{config.capacity, config.trigger};
      options.ladder_width = config.R;
      options.seed = config.seed;
      options.interleave = config.interleave;
      const auto sources = partition_sources(dataset.elements, config.m);
      out.m_used = sources.size();
      const MultiSourceOutcome ms =
          multisource_run(oracle, sources, options, sink);
      out.solution = ms.solution;
      out.metrics = ms.metrics;
      break;
    }
  }

  out.metrics.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
  return out;
}

// ---------------------------------------------------------------------------
// Metrics CSV: "# schema=1" comment, pinned column order, reals at 17
// significant digits so every value round-trips, and a trailing run_id used
// to keep repeated sweep appends idempotent.

inline constexpr const char* kCsvSchemaComment = "# schema=1";
inline constexpr const char* kCsvHeader =
    "algorithm,objective,n,k,epsilon,capacity,trigger,m,R,seed,utility,"
    "peak_memory,queries,rounds,communication,wasted_communication,wall_ms,"
    "run_id";

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::uint64_t run_id_of(const ExperimentConfig& c) {
  std::ostringstream key;
  key << algorithm_name(c.algorithm) << '|' << objective_name(c.objective)
      << '|' << c.k << '|' << format_real(c.epsilon) << '|' << c.capacity
      << '|' << format_real(c.trigger) << '|' << c.m << '|' << c.R << '|'
      << format_real(c.alpha) << '|' << c.seed << '|' << c.dataset_path;
  if (c.generator) {
    key << "|gen" << static_cast<int>(c.generator->kind) << ':'
        << c.generator->n << ':' << c.generator->vocabulary << ':'
        << c.generator->dimensions;
  }
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (const char ch : key.str()) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string csv_row(const ExperimentConfig& c, const RunOutcome& out) {
  std::ostringstream row;
  row << algorithm_name(c.algorithm) << ',' << objective_name(c.objective)
      << ',' << out.n << ',' << c.k << ',' << format_real(c.epsilon) << ','
      << c.capacity << ',' << format_real(c.trigger) << ',' << out.m_used
      << ','
      << c.R << ',' << c.seed << ',' << format_real(out.metrics.utility)
      << ',' << out.metrics.peak_memory << ',' << out.metrics.queries << ','
      << out.metrics.adaptive_rounds << ',' << out.metrics.communication
      << ',' << out.metrics.wasted_communication << ','
      << out.metrics.wall_ms << ',' << run_id_of(c);
  return row.str();
}

// Cartesian sweep axes. Every axis must be non-empty.
struct SweepSpec {
  std::vector<Algorithm> algorithms;
  std::vector<std::size_t> ks{1};
  std::vector<double> epsilons{0.1};
  std::vector<std::size_t> capacities{100};
  std::vector<double> triggers{0.8};
  std::vector<std::size_t> ms{1};
  std::vector<int> Rs{1};
  std::vector<std::uint64_t> seeds{0};
  ExperimentConfig base;  // objective, dataset/generator, alpha, interleave
};

inline std::vector<ExperimentConfig> expand_sweep(const SweepSpec& spec) {
  if (spec.algorithms.empty() || spec.ks.empty() || spec.epsilons.empty() ||
      spec.capacities.empty() || spec.triggers.empty() || spec.ms.empty() ||
      spec.Rs.empty() || spec.seeds.empty()) {
    throw ConfigError("sweep: every axis list must be non-empty");
  }
  std::vector<ExperimentConfig> configs;
  for (Algorithm a : spec.algorithms)
    for (std::size_t k : spec.ks)
      for (double eps : spec.epsilons)
        for (std::size_t cap : spec.capacities)
          for (double trig : spec.triggers)
            for (std::size_t m : spec.ms)
              for (int r : spec.Rs)
                for (std::uint64_t seed : spec.seeds) {
                  ExperimentConfig c = spec.base;
                  c.algorithm = a;
                  c.k = k;
                  c.epsilon = eps;
                  c.capacity = cap;
                  c.trigger = trig;
                  c.m = is_multisource(a) ? m : 1;
                  c.R = a == Algorithm::kTradeoff ? r : 1;
                  c.seed = seed;
                  validate(c);
                  configs.push_back(std::move(c));
                }
  return configs;
}

// Runs the cartesian product and appends one row per (config, seed) to the
// CSV, skipping run_ids already present so reruns are append-safe.
inline std::size_t sweep(const SweepSpec& spec, const std::string& out_path) {
  const std::vector<ExperimentConfig> configs = expand_sweep(spec);
  std::set<std::string> existing;
  bool file_exists = false;
  {
    std::ifstream in(out_path);
    if (in) {
      file_exists = true;
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("algorithm,", 0) == 0)
          continue;
        const auto pos = line.find_last_of(',');
        if (pos != std::string::npos) existing.insert(line.substr(pos + 1));
      }
    }
  }
  std::ofstream out(out_path, std::ios::app);
  if (!out) throw DataError("cannot open " + out_path + " for writing");
  if (!file_exists) {
    out << kCsvSchemaComment << "\n" << kCsvHeader << "\n";
  }
  std::size_t written = 0;
  for (const ExperimentConfig& c : configs) {
    if (existing.count(std::to_string(run_id_of(c))) > 0) continue;
    const RunOutcome res = run_experiment(c);
    out << csv_row(c, res) << "\n";
    ++written;
  }
  return written;
}

}  // namespace sievestream
