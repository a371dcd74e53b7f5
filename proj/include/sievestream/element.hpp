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
#include <string>
#include <variant>
#include <vector>

namespace sievestream {

// A tweet-like item: a non-empty bag of keyword tokens plus a non-negative
// value shared by all of its keywords.
struct KeywordBag {
  std::vector<std::string> keywords;  // sorted, unique
  double value = 0.0;
  bool operator==(const KeywordBag&) const = default;
};

// A fixed-dimension feature vector (e.g. one compressed video frame).
struct EmbeddingVector {
  std::vector<double> coords;
  bool operator==(const EmbeddingVector&) const = default;
};

// A plain weight; the modular objective sums these.
struct WeightedItem {
  double weight = 0.0;
  bool operator==(const WeightedItem&) const = default;
};

// The identifiers of universe items this element covers, for the weighted
// max-coverage objective. Sorted, unique.
struct CoverageSet {
  std::vector<std::uint32_t> covered;
  bool operator==(const CoverageSet&) const = default;
};

using Payload =
    std::variant<KeywordBag, EmbeddingVector, WeightedItem, CoverageSet>;

// One stream item. Ids are unique within a ground set; `source` names the
// stream the element arrives on in multi-source runs.
struct Element {
  std::uint64_t id = 0;
  std::uint32_t source = 0;
  Payload payload;
};

// Algorithms pass sets around as ordered lists of pointers into the run's
// ground set. Objectives treat them as sets (evaluation is order-free).
using ElementVec = std::vector<const Element*>;

inline bool contains(const ElementVec& s, const Element* e) {
  for (const Element* x : s) {
    if (x == e) return true;
  }
  return false;
}

}  // namespace sievestream
