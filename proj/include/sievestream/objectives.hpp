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

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sievestream/element.hpp"
#include "sievestream/errors.hpp"

namespace sievestream {

// A monotone submodular set function over elements. Evaluation must be a
// pure function of the *set*: implementations iterate elements in id order
// so the same set always produces the same bits regardless of the order the
// caller assembled it in.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double value(const ElementVec& set) const = 0;
  virtual const char* name() const = 0;
};

namespace detail {

inline ElementVec sorted_by_id(const ElementVec& set) {
  ElementVec s = set;
  std::sort(s.begin(), s.end(), [](const Element* a, const Element* b) {
    return a->id < b->id;
  });
  return s;
}

template <typename T>
const T& payload_as(const Element* e, const char* objective) {
  const T* p = std::get_if<T>(&e->payload);
  if (p == nullptr) {
    throw InvariantError(std::string(objective) +
                         ": element id=" + std::to_string(e->id) +
                         " carries the wrong payload variant");
  }
  return *p;
}

}  // namespace detail

// f(S) = sum over weights of S. The trivial modular baseline used by unit
// tests and hand-traceable streams.
class ModularObjective final : public Objective {
 public:
  double value(const ElementVec& set) const override {
    double total = 0.0;
    for (const Element* e : detail::sorted_by_id(set)) {
      total += detail::payload_as<WeightedItem>(e, name()).weight;
    }
    return total;
  }
  const char* name() const override { return "modular"; }
};

// f(S) = sum_w sqrt(sum_{e in S} score(w, e)) with score(w, e) = val_e when
// w is one of e's keywords and 0 otherwise.
class KeywordCoverageObjective final : public Objective {
 public:
  double value(const ElementVec& set) const override {
    std::vector<std::pair<std::string_view, double>> scores;
    for (const Element* e : detail::sorted_by_id(set)) {
      const KeywordBag& bag = detail::payload_as<KeywordBag>(e, name());
      for (const std::string& w : bag.keywords) {
        scores.emplace_back(std::string_view(w), bag.value);
      }
    }
    std::stable_sort(scores.begin(), scores.end(),
                     [](const auto& a, const auto& b) {
                       return a.first < b.first;
                     });
    double total = 0.0;
    std::size_t i = 0;
    while (i < scores.size()) {
      double keyword_sum = 0.0;
      const std::string_view w = scores[i].first;
      for (; i < scores.size() && scores[i].first == w; ++i) {
        keyword_sum += scores[i].second;
      }
      total += std::sqrt(keyword_sum);
    }
    return total;
  }
  const char* name() const override { return "keywords"; }
};

// f(S) = log det(I + alpha * M_S) with M_ij = exp(-||v_i - v_j||_2), the
// similarity kernel over embedding vectors. Computed with a Cholesky
// factorization of the |S| x |S| kernel rebuilt per query; a factorization
// failure signals a numerically non-positive-definite I + alpha * M_S.
class LogDetObjective final : public Objective {
 public:
  explicit LogDetObjective(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0)) {
      throw ConfigError("logdet: alpha must be positive");
    }
  }

  double value(const ElementVec& set) const override {
    if (set.empty()) return 0.0;
    const ElementVec s = detail::sorted_by_id(set);
    const std::size_t n = s.size();
    const std::size_t dim =
        detail::payload_as<EmbeddingVector>(s[0], name()).coords.size();
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& vi = detail::payload_as<EmbeddingVector>(s[i], name());
      if (vi.coords.size() != dim) {
        throw InvariantError("logdet: inconsistent embedding dimensions");
      }
      a(i, i) = 1.0 + alpha_;
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto& vj = detail::payload_as<EmbeddingVector>(s[j], name());
        double sq = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          const double diff = vi.coords[d] - vj.coords[d];
          sq += diff * diff;
        }
        const double m = std::exp(-std::sqrt(sq));
        a(i, j) = alpha_ * m;
        a(j, i) = alpha_ * m;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
      throw InvariantError(
          "logdet: Cholesky failed; I + alpha*M is not positive definite "
          "(data or alpha pathology)");
    }
    double logdet = 0.0;
    const auto& l = llt.matrixLLT();
    for (std::size_t i = 0; i < n; ++i) {
      logdet += std::log(l(i, i));
    }
    return 2.0 * logdet;
  }

  const char* name() const override { return "logdet"; }
  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

// f(S) = total weight of the universe items covered by the union of S's
// coverage sets.
class WeightedCoverageObjective final : public Objective {
 public:
  explicit WeightedCoverageObjective(std::map<std::uint32_t, double> weights)
      : universe_weights_(std::move(weights)) {}

  double value(const ElementVec& set) const override {
    std::vector<std::uint32_t> covered;
    for (const Element* e : detail::sorted_by_id(set)) {
      const CoverageSet& c = detail::payload_as<CoverageSet>(e, name());
      covered.insert(covered.end(), c.covered.begin(), c.covered.end());
    }
    std::sort(covered.begin(), covered.end());
    covered.erase(std::unique(covered.begin(), covered.end()), covered.end());
    double total = 0.0;
    for (std::uint32_t id : covered) {
      auto it = universe_weights_.find(id);
      if (it == universe_weights_.end()) {
        throw DataError("coverage: covered id " + std::to_string(id) +
                        " missing from universe weights");
      }
      total += it->second;
    }
    return total;
  }

  const char* name() const override { return "coverage"; }
  const std::map<std::uint32_t, double>& universe_weights() const {
    return universe_weights_;
  }

 private:
  std::map<std::uint32_t, double> universe_weights_;
};

}  // namespace sievestream
