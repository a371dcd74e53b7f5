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
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sievestream/element.hpp"
#include "sievestream/errors.hpp"
#include "sievestream/rng.hpp"

namespace sievestream {

struct Dataset {
  std::vector<Element> elements;
  std::map<std::uint32_t, double> coverage_weights;  // coverage only
  std::size_t embedding_dim = 0;                     // vectors only
};

// One JSON record per line: {"id": int, "keywords": [string...],
// "retweets": int, "source": int}. The element value is
// retweets / |keywords|; the raw retweet count stays in the file so either
// weighting is reproducible. Malformed lines are rejected with their line
// number, never skipped.
inline Dataset load_tweets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  Dataset ds;
  std::set<std::uint64_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": invalid JSON: " + e.what());
    }
    const auto fail = [&](const std::string& why) {
      throw DataError(path + ": line " + std::to_string(line_no) + ": " + why);
    };
    if (!rec.contains("id") || !rec["id"].is_number_unsigned()) {
      fail("missing or non-integer id");
    }
    if (!rec.contains("keywords") || !rec["keywords"].is_array()) {
      fail("missing keywords array");
    }
    if (!rec.contains("retweets") || !rec["retweets"].is_number_integer()) {
      fail("missing retweets");
    }
    if (!rec.contains("source") || !rec["source"].is_number_unsigned()) {
      fail("missing or non-integer source");
    }
    const std::int64_t retweets = rec["retweets"].get<std::int64_t>();
    if (retweets < 0) fail("negative retweets");
    std::vector<std::string> keywords;
    for (const auto& kw : rec["keywords"]) {
      if (!kw.is_string()) fail("non-string keyword");
      keywords.push_back(kw.get<std::string>());
    }
    std::sort(keywords.begin(), keywords.end());
    keywords.erase(std::unique(keywords.begin(), keywords.end()),
                   keywords.end());
    if (keywords.empty()) fail("empty keyword list");
    Element e;
    e.id = rec["id"].get<std::uint64_t>();
    if (!seen.insert(e.id).second) {
      fail("duplicate id " + std::to_string(e.id));
    }
    e.source = rec["source"].get<std::uint32_t>();
    const double value =
        static_cast<double>(retweets) / static_cast<double>(keywords.size());
    e.payload = KeywordBag{std::move(keywords), value};
    ds.elements.push_back(std::move(e));
  }
  return ds;
}

// CSV with header "id,source,x0,...,x{d-1}". The dimension is inferred from
// the header and enforced on every row; non-finite coordinates and ragged
// rows are rejected.
inline Dataset load_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  Dataset ds;
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  if (header.size() < 3 || header[0] != "id" || header[1] != "source") {
    throw DataError(path + ": header must be id,source,x0,...");
  }
  for (std::size_t d = 2; d < header.size(); ++d) {
    if (header[d] != "x" + std::to_string(d - 2)) {
      throw DataError(path + ": unexpected header column '" + header[d] + "'");
    }
  }
  const std::size_t dim = header.size() - 2;
  ds.embedding_dim = dim;
  std::set<std::uint64_t> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != dim + 2) {
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": expected " + std::to_string(dim + 2) +
                      " fields, got " + std::to_string(fields.size()));
    }
    const auto parse_u64 = [&](const std::string& s) {
      try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
      } catch (const std::exception&) {
        throw DataError(path + ": line " + std::to_string(line_no) +
                        ": bad integer '" + s + "'");
      }
    };
    Element e;
    e.id = parse_u64(fields[0]);
    e.source = static_cast<std::uint32_t>(parse_u64(fields[1]));
    if (!seen.insert(e.id).second) {
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": duplicate id " + std::to_string(e.id));
    }
    EmbeddingVector vec;
    vec.coords.reserve(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      std::size_t pos = 0;
      double x = 0.0;
      try {
        x = std::stod(fields[d + 2], &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != fields[d + 2].size() || !std::isfinite(x)) {
        throw DataError(path + ": line " + std::to_string(line_no) +
                        ": non-finite or malformed coordinate '" +
                        fields[d + 2] + "'");
      }
      vec.coords.push_back(x);
    }
    e.payload = std::move(vec);
    ds.elements.push_back(std::move(e));
  }
  return ds;
}

enum class GeneratorKind {
  kZipfTweets,
  kGaussianVectors,
  kPlantedCoverage,
  kModular,
};

// Synthetic instance recipe. Instances are byte-identical per seed; the
// distributional knobs are fields here, not hidden constants.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kModular;
  std::size_t n = 0;
  std::size_t vocabulary = 200;   // zipf_tweets
  double zipf_exponent = 1.1;     // zipf_tweets keyword skew
  std::size_t max_keywords = 8;   // zipf_tweets keywords per element
  double retweet_tail = 2.0;      // zipf_tweets Pareto tail index
  std::size_t dimensions = 4;     // gaussian_vectors
  std::size_t clusters = 10;      // gaussian_vectors centers
  std::size_t universe = 0;       // planted_coverage (0 -> 3n)
  std::size_t sources = 1;        // stream partition count
  std::uint64_t seed = 0;
};

inline Dataset generate(const GeneratorSpec& spec) {
  if (spec.n == 0) throw ConfigError("generator: n must be >= 1");
  if (spec.sources == 0) throw ConfigError("generator: sources must be >= 1");
  Dataset ds;
  Rng rng(spec.seed);
  switch (spec.kind) {
    case GeneratorKind::kZipfTweets: {
      if (spec.vocabulary == 0) {
        throw ConfigError("generator: vocabulary must be >= 1");
      }
      std::vector<double> cdf(spec.vocabulary);
      double mass = 0.0;
      for (std::size_t w = 0; w < spec.vocabulary; ++w) {
        mass += std::pow(static_cast<double>(w + 1), -spec.zipf_exponent);
        cdf[w] = mass;
      }
      for (std::size_t i = 0; i < spec.n; ++i) {
        const std::size_t want = std::min(
            spec.vocabulary,
            1 + static_cast<std::size_t>(rng.uniform_below(spec.max_keywords)));
        std::set<std::size_t> words;
        while (words.size() < want) {
          const double u = rng.uniform01() * mass;
          const std::size_t w = static_cast<std::size_t>(
              std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
          words.insert(std::min(w, spec.vocabulary - 1));
        }
        // Heavy-tailed retweet counts, always at least 1.
        const double pareto =
            std::pow(1.0 - rng.uniform01(), -1.0 / spec.retweet_tail);
        const std::int64_t retweets =
            1 + static_cast<std::int64_t>(std::min(pareto, 1e6));
        KeywordBag bag;
        for (std::size_t w : words) {
          bag.keywords.push_back("w" + std::to_string(w));
        }
        std::sort(bag.keywords.begin(), bag.keywords.end());
        bag.value = static_cast<double>(retweets) /
                    static_cast<double>(bag.keywords.size());
        Element e;
        e.id = i;
        e.source = static_cast<std::uint32_t>(i % spec.sources);
        e.payload = std::move(bag);
        ds.elements.push_back(std::move(e));
      }
      break;
    }
    case GeneratorKind::kGaussianVectors: {
      if (spec.dimensions == 0 || spec.clusters == 0) {
        throw ConfigError("generator: dimensions and clusters must be >= 1");
      }
      std::vector<std::vector<double>> centers(spec.clusters);
      for (auto& c : centers) {
        c.resize(spec.dimensions);
        for (double& x : c) x = 3.0 * rng.normal();
      }
      for (std::size_t i = 0; i < spec.n; ++i) {
        const std::size_t c =
            static_cast<std::size_t>(rng.uniform_below(spec.clusters));
        EmbeddingVector v;
        v.coords.resize(spec.dimensions);
        for (std::size_t d = 0; d < spec.dimensions; ++d) {
          v.coords[d] = centers[c][d] + 0.5 * rng.normal();
        }
        Element e;
        e.id = i;
        e.source = static_cast<std::uint32_t>(i % spec.sources);
        e.payload = std::move(v);
        ds.elements.push_back(std::move(e));
      }
      break;
    }
    case GeneratorKind::kPlantedCoverage: {
      const std::size_t universe =
          spec.universe > 0 ? spec.universe : 3 * spec.n;
      for (std::uint32_t u = 0; u < universe; ++u) {
        ds.coverage_weights[u] = 0.5 + rng.uniform01();
      }
      for (std::size_t i = 0; i < spec.n; ++i) {
        const std::size_t want =
            std::min(universe, 1 + static_cast<std::size_t>(
                                       rng.uniform_below(4)));
        std::set<std::uint32_t> covered;
        while (covered.size() < want) {
          covered.insert(
              static_cast<std::uint32_t>(rng.uniform_below(universe)));
        }
        Element e;
        e.id = i;
        e.source = static_cast<std::uint32_t>(i % spec.sources);
        e.payload =
            CoverageSet{std::vector<std::uint32_t>(covered.begin(),
                                                   covered.end())};
        ds.elements.push_back(std::move(e));
      }
      break;
    }
    case GeneratorKind::kModular: {
      for (std::size_t i = 0; i < spec.n; ++i) {
        Element e;
        e.id = i;
        e.source = static_cast<std::uint32_t>(i % spec.sources);
        e.payload = WeightedItem{0.5 + 9.5 * rng.uniform01()};
        ds.elements.push_back(std::move(e));
      }
      break;
    }
  }
  return ds;
}

// Writes a tweets dataset back out in the load_tweets format. Retweet counts
// are reconstructed as value * |keywords| (exact for generated data).
inline void write_tweets(const Dataset& ds, std::ostream& out) {
  for (const Element& e : ds.elements) {
    const auto& bag = std::get<KeywordBag>(e.payload);
    nlohmann::json rec;
    rec["id"] = e.id;
    rec["source"] = e.source;
    rec["retweets"] = static_cast<std::int64_t>(
        std::llround(bag.value * static_cast<double>(bag.keywords.size())));
    rec["keywords"] = bag.keywords;
    out << rec.dump() << "\n";
  }
}

inline void write_vectors(const Dataset& ds, std::ostream& out) {
  std::size_t dim = ds.embedding_dim;
  if (dim == 0 && !ds.elements.empty()) {
    dim = std::get<EmbeddingVector>(ds.elements.front().payload).coords.size();
  }
  out << "id,source";
  for (std::size_t d = 0; d < dim; ++d) out << ",x" << d;
  out << "\n";
  char buf[64];
  for (const Element& e : ds.elements) {
    const auto& v = std::get<EmbeddingVector>(e.payload);
    out << e.id << "," << e.source;
    for (double x : v.coords) {
      std::snprintf(buf, sizeof(buf), "%.17g", x);
      out << "," << buf;
    }
    out << "\n";
  }
}

}  // namespace sievestream
