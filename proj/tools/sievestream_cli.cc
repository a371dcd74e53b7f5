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

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sievestream/datasets.hpp"
#include "sievestream/errors.hpp"
#include "sievestream/experiment.hpp"

namespace {

using namespace sievestream;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInvariant = 4;

// Seed lists accept "1,2,3" and ranges like "1..30".
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dots = part.find("..");
    if (dots != std::string::npos) {
      const std::uint64_t lo = std::stoull(part.substr(0, dots));
      const std::uint64_t hi = std::stoull(part.substr(dots + 2));
      if (hi < lo) throw ConfigError("bad seed range '" + part + "'");
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else if (!part.empty()) {
      seeds.push_back(std::stoull(part));
    }
  }
  if (seeds.empty()) throw ConfigError("empty seed list");
  return seeds;
}

struct CommonOptions {
  std::string algorithm = "sievepp";
  std::string objective;
  std::size_t k = 1;
  double epsilon = 0.1;
  bool k_set = false;
  bool epsilon_set = false;
  bool m_set = false;
  std::size_t capacity = 100;
  double trigger = 0.8;
  std::size_t m = 1;
  int r = 1;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  std::string dataset;
  std::string generator;
  std::size_t n = 0;
  std::size_t vocabulary = 200;
  double zipf_exponent = 1.1;
  double retweet_tail = 2.0;
  std::size_t max_keywords = 8;
  std::size_t dimensions = 4;
  std::size_t clusters = 10;
  std::size_t universe = 0;
  std::string interleave = "roundrobin";
};

void add_common_flags(CLI::App* cmd, CommonOptions* opt) {
  cmd->add_option("--algorithm", opt->algorithm,
                  "sieve|sievepp|preemption|batch_sievepp|sample_one|"
                  "multisource|tradeoff|greedy|brute");
  cmd->add_option("--objective", opt->objective,
                  "keywords|logdet|coverage|modular (default: inferred)");
  cmd->add_option("--k", opt->k, "cardinality constraint (multisource: 50)")
      ->each([opt](const std::string&) { opt->k_set = true; });
  cmd->add_option("--epsilon", opt->epsilon,
                  "grid granularity in (0,1) (multisource: 0.7)")
      ->each([opt](const std::string&) { opt->epsilon_set = true; });
  cmd->add_option("--capacity", opt->capacity, "buffer capacity B");
  cmd->add_option("--trigger", opt->trigger, "buffer trigger fraction");
  cmd->add_option("--m", opt->m,
                  "stream machine count (zipf analogue: 30, gaussian: 10)")
      ->each([opt](const std::string&) { opt->m_set = true; });
  cmd->add_option("--R", opt->r, "ladder width (tradeoff only)");
  cmd->add_option("--alpha", opt->alpha, "logdet kernel scale");
  cmd->add_option("--seed", opt->seed, "master seed");
  cmd->add_option("--dataset", opt->dataset, "input .jsonl or .csv path");
  cmd->add_option("--generator", opt->generator,
                  "zipf_tweets|gaussian_vectors|planted_coverage|modular");
  cmd->add_option("--n", opt->n, "generated ground-set size");
  cmd->add_option("--vocabulary", opt->vocabulary, "zipf keyword vocabulary");
  cmd->add_option("--zipf-exponent", opt->zipf_exponent, "zipf skew");
  cmd->add_option("--retweet-tail", opt->retweet_tail,
                  "retweet Pareto tail index");
  cmd->add_option("--max-keywords", opt->max_keywords,
                  "max keywords per generated tweet");
  cmd->add_option("--dimensions", opt->dimensions, "embedding dimension");
  cmd->add_option("--clusters", opt->clusters, "gaussian cluster count");
  cmd->add_option("--universe", opt->universe, "coverage universe size");
  cmd->add_option("--interleave", opt->interleave, "roundrobin|random");
}

// Unset flags fall back to the reference experiment settings: multisource
// runs default to epsilon=0.7, k=50; generated multi-stream analogues default
// to 30 tweet feeds or 10 video feeds.
ExperimentConfig to_config(const CommonOptions& opt) {
  ExperimentConfig c;
  c.algorithm = parse_algorithm(opt.algorithm);
  const bool multi = c.algorithm == Algorithm::kMultisource ||
                     c.algorithm == Algorithm::kTradeoff;
  c.k = !opt.k_set && multi ? 50 : opt.k;
  c.epsilon = !opt.epsilon_set && multi ? 0.7 : opt.epsilon;
  c.capacity = opt.capacity;
  c.trigger = opt.trigger;
  c.m = opt.m;
  if (!opt.m_set && multi && !opt.generator.empty()) {
    if (opt.generator == "zipf_tweets") c.m = 30;
    if (opt.generator == "gaussian_vectors") c.m = 10;
  }
  c.R = opt.r;
  c.alpha = opt.alpha;
  c.seed = opt.seed;
  c.dataset_path = opt.dataset;
  if (opt.interleave == "roundrobin") {
    c.interleave = Interleave::kRoundRobin;
  } else if (opt.interleave == "random") {
    c.interleave = Interleave::kSeededRandom;
  } else {
    throw ConfigError("unknown interleave mode '" + opt.interleave + "'");
  }
  if (!opt.generator.empty()) {
    GeneratorSpec spec;
    spec.kind = parse_generator_kind(opt.generator);
    spec.n = opt.n;
    spec.vocabulary = opt.vocabulary;
    spec.zipf_exponent = opt.zipf_exponent;
    spec.retweet_tail = opt.retweet_tail;
    spec.max_keywords = opt.max_keywords;
    spec.dimensions = opt.dimensions;
    spec.clusters = opt.clusters;
    spec.universe = opt.universe;
    c.generator = spec;
  }
  if (!opt.objective.empty()) {
    c.objective = parse_objective(opt.objective);
  } else if (c.generator) {
    c.objective = objective_for_generator(c.generator->kind);
  } else if (!c.dataset_path.empty()) {
    const bool jsonl =
        c.dataset_path.size() >= 6 &&
        c.dataset_path.substr(c.dataset_path.size() - 6) == ".jsonl";
    c.objective = jsonl ? ObjectiveKind::kKeywords : ObjectiveKind::kLogDet;
  }
  return c;
}

void print_metrics(const ExperimentConfig& c, const RunOutcome& out) {
  std::cout << "algorithm=" << algorithm_name(c.algorithm)
            << " objective=" << objective_name(c.objective) << " n=" << out.n
            << " k=" << c.k << " epsilon=" << format_real(c.epsilon)
            << " seed=" << c.seed << "\n"
            << "utility=" << format_real(out.metrics.utility)
            << " peak_memory=" << out.metrics.peak_memory
            << " queries=" << out.metrics.queries
            << " rounds=" << out.metrics.adaptive_rounds
            << " communication=" << out.metrics.communication
            << " wasted_communication=" << out.metrics.wasted_communication
            << " wall_ms=" << out.metrics.wall_ms << "\n";
}

int run_main(const CommonOptions& opt, const std::string& out_csv,
             const std::string& solution_out, bool with_trace) {
  const ExperimentConfig config = to_config(opt);
  TraceSink sink;
  if (with_trace) {
    sink = [](const std::string& line) { std::cout << line << "\n"; };
    if (!is_buffered(config.algorithm)) {
      throw ConfigError("trace replays flush events; use a buffered algorithm "
                        "(batch_sievepp, sample_one, multisource, tradeoff)");
    }
  }
  const RunOutcome out = run_experiment(config, sink);
  print_metrics(config, out);
  if (!out_csv.empty()) {
    const bool exists = static_cast<bool>(std::ifstream(out_csv));
    std::ofstream f(out_csv, std::ios::app);
    if (!f) throw DataError("cannot open " + out_csv);
    if (!exists) f << kCsvSchemaComment << "\n" << kCsvHeader << "\n";
    f << csv_row(config, out) << "\n";
  }
  if (!solution_out.empty()) {
    std::ofstream f(solution_out);
    if (!f) throw DataError("cannot open " + solution_out);
    f << "# utility=" << format_real(out.metrics.utility) << "\n";
    for (const Element* e : out.solution) f << e->id << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming submodular maximization toolkit"};
  app.require_subcommand(1);

  CommonOptions run_opt;
  std::string run_csv, run_solution;
  CLI::App* run_cmd = app.add_subcommand("run", "execute one experiment");
  add_common_flags(run_cmd, &run_opt);
  run_cmd->add_option("--out", run_csv, "append a metrics CSV row here");
  run_cmd->add_option("--solution-out", run_solution, "dump solution ids");

  CommonOptions trace_opt;
  CLI::App* trace_cmd =
      app.add_subcommand("trace", "run with the per-flush event log");
  add_common_flags(trace_cmd, &trace_opt);

  CommonOptions sweep_opt;
  std::string sweep_algorithms = "sievepp";
  std::string sweep_ks = "1";
  std::string sweep_epsilons = "0.1";
  std::string sweep_capacities = "100";
  std::string sweep_ms = "1";
  std::string sweep_rs = "1";
  std::string sweep_seeds = "0";
  std::string sweep_out = "metrics.csv";
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "cartesian sweep to a metrics CSV");
  add_common_flags(sweep_cmd, &sweep_opt);
  sweep_cmd->add_option("--algorithms", sweep_algorithms,
                        "comma-separated algorithm list");
  sweep_cmd->add_option("--ks", sweep_ks, "comma-separated k list");
  sweep_cmd->add_option("--epsilons", sweep_epsilons, "epsilon list");
  sweep_cmd->add_option("--capacities", sweep_capacities, "capacity list");
  sweep_cmd->add_option("--ms", sweep_ms, "machine-count list");
  sweep_cmd->add_option("--Rs", sweep_rs, "ladder width list");
  sweep_cmd->add_option("--seeds", sweep_seeds, "seed list, e.g. 1..30");
  sweep_cmd->add_option("--out", sweep_out, "output CSV path");

  CommonOptions gen_opt;
  std::string gen_out;
  CLI::App* gen_cmd =
      app.add_subcommand("gen", "materialize a generated dataset");
  add_common_flags(gen_cmd, &gen_opt);
  gen_cmd->add_option("--out", gen_out, "output path (.jsonl or .csv)")
      ->required();

  std::string validate_path, validate_format = "auto";
  CLI::App* validate_cmd = app.add_subcommand("validate", "lint a dataset");
  validate_cmd->add_option("--dataset", validate_path, "path")->required();
  validate_cmd->add_option("--format", validate_format,
                           "tweets|vectors|auto");

  CLI::App* columns_cmd = app.add_subcommand(
      "columns", "print the metrics CSV schema with gnuplot column indices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run_cmd->parsed()) {
      return run_main(run_opt, run_csv, run_solution, false);
    }
    if (trace_cmd->parsed()) {
      return run_main(trace_opt, "", "", true);
    }
    if (sweep_cmd->parsed()) {
      SweepSpec spec;
      spec.base = to_config(sweep_opt);
      std::stringstream ss(sweep_algorithms);
      std::string part;
      while (std::getline(ss, part, ','))
        spec.algorithms.push_back(parse_algorithm(part));
      spec.ks.clear();
      for (std::uint64_t v : parse_seed_list(sweep_ks)) spec.ks.push_back(v);
      spec.epsilons.clear();
      {
        std::stringstream es(sweep_epsilons);
        while (std::getline(es, part, ','))
          spec.epsilons.push_back(std::stod(part));
      }
      spec.capacities.clear();
      for (std::uint64_t v : parse_seed_list(sweep_capacities))
        spec.capacities.push_back(v);
      spec.ms.clear();
      for (std::uint64_t v : parse_seed_list(sweep_ms)) spec.ms.push_back(v);
      spec.Rs.clear();
      for (std::uint64_t v : parse_seed_list(sweep_rs))
        spec.Rs.push_back(static_cast<int>(v));
      spec.seeds = parse_seed_list(sweep_seeds);
      spec.triggers = {sweep_opt.trigger};
      const std::size_t rows = sweep(spec, sweep_out);
      std::cout << "wrote " << rows << " rows to " << sweep_out << "\n";
      return kExitOk;
    }
    if (gen_cmd->parsed()) {
      if (gen_opt.generator.empty()) {
        throw ConfigError("gen requires --generator");
      }
      GeneratorSpec spec;
      spec.kind = parse_generator_kind(gen_opt.generator);
      spec.n = gen_opt.n;
      spec.vocabulary = gen_opt.vocabulary;
      spec.zipf_exponent = gen_opt.zipf_exponent;
      spec.retweet_tail = gen_opt.retweet_tail;
      spec.max_keywords = gen_opt.max_keywords;
      spec.dimensions = gen_opt.dimensions;
      spec.clusters = gen_opt.clusters;
      spec.universe = gen_opt.universe;
      spec.sources = gen_opt.m;
      if (!gen_opt.m_set) {
        if (spec.kind == GeneratorKind::kZipfTweets) spec.sources = 30;
        if (spec.kind == GeneratorKind::kGaussianVectors) spec.sources = 10;
      }
      spec.seed = gen_opt.seed;
      const Dataset ds = generate(spec);
      std::ofstream out(gen_out);
      if (!out) throw DataError("cannot open " + gen_out);
      if (spec.kind == GeneratorKind::kZipfTweets) {
        write_tweets(ds, out);
      } else if (spec.kind == GeneratorKind::kGaussianVectors) {
        write_vectors(ds, out);
      } else {
        throw ConfigError(
            "gen writes zipf_tweets (.jsonl) and gaussian_vectors (.csv); "
            "coverage and modular instances are in-memory generator kinds");
      }
      std::cout << "wrote " << ds.elements.size() << " elements to "
                << gen_out << "\n";
      return kExitOk;
    }
    if (validate_cmd->parsed()) {
      std::string format = validate_format;
      if (format == "auto") {
        format = validate_path.size() >= 6 &&
                         validate_path.substr(validate_path.size() - 6) ==
                             ".jsonl"
                     ? "tweets"
                     : "vectors";
      }
      Dataset ds;
      if (format == "tweets") {
        ds = load_tweets(validate_path);
      } else if (format == "vectors") {
        ds = load_vectors(validate_path);
      } else {
        throw ConfigError("unknown format '" + format + "'");
      }
      std::set<std::uint32_t> sources;
      for (const Element& e : ds.elements) sources.insert(e.source);
      std::cout << "ok: " << ds.elements.size() << " elements, "
                << sources.size() << " sources";
      if (ds.embedding_dim > 0) std::cout << ", dim=" << ds.embedding_dim;
      std::cout << "\n";
      return kExitOk;
    }
    if (columns_cmd->parsed()) {
      std::cout << kCsvSchemaComment << "\n";
      std::stringstream ss(kCsvHeader);
      std::string col;
      int idx = 1;
      while (std::getline(ss, col, ',')) {
        std::cout << idx << "\t" << col << "\n";
        ++idx;
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitConfig;
}
