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

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "sievestream/objectives.hpp"
#include "sievestream/oracle.hpp"
#include "test_support.hpp"

namespace sievestream {
namespace {

using testing::cov;
using testing::kw;
using testing::refs;
using testing::unit_weights;
using testing::vec;
using testing::wt;

TEST(Eval, EmptySetIsZeroForEveryObjective) {
  WeightedCoverageObjective coverage(unit_weights(4));
  KeywordCoverageObjective keywords;
  LogDetObjective logdet(1.0);
  ModularObjective modular;
  EXPECT_EQ(coverage.value({}), 0.0);
  EXPECT_EQ(keywords.value({}), 0.0);
  EXPECT_EQ(logdet.value({}), 0.0);
  EXPECT_EQ(modular.value({}), 0.0);
}

TEST(Eval, KeywordExamples) {
  KeywordCoverageObjective f;
  const Element one = kw(0, {"a", "b"}, 4.0);
  EXPECT_DOUBLE_EQ(f.value({&one}), 4.0);  // sqrt(4) + sqrt(4)

  const Element t1 = kw(1, {"a"}, 1.0);
  const Element t2 = kw(2, {"a"}, 1.0);
  EXPECT_NEAR(f.value({&t1, &t2}), std::sqrt(2.0), 1e-12);

  const Element big = kw(3, {"a", "b", "c"}, 9.0);
  EXPECT_DOUBLE_EQ(f.value({&big}), 9.0);  // 3 * sqrt(9)

  const Element e1 = kw(4, {"a"}, 4.0);
  const Element e2 = kw(5, {"a", "b"}, 5.0);
  EXPECT_NEAR(f.value({&e1, &e2}), 3.0 + std::sqrt(5.0), 1e-12);
}

TEST(Eval, LogDetIdentities) {
  LogDetObjective f(1.0);
  const Element v1 = vec(0, {0.25, -1.5, 3.0});
  EXPECT_NEAR(f.value({&v1}), std::log(2.0), 1e-12);

  const Element v2 = vec(1, {0.25, -1.5, 3.0});  // identical coordinates
  EXPECT_NEAR(f.value({&v1, &v2}), std::log(3.0), 1e-12);
}

TEST(Eval, WeightedCoverageExamples) {
  WeightedCoverageObjective f(unit_weights(5));
  const Element a = cov(0, {1, 2});
  const Element b = cov(1, {2, 3});
  EXPECT_DOUBLE_EQ(f.value({&a, &b}), 3.0);

  const Element full = cov(2, {0, 1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(f.value({&full}), 5.0);
}

TEST(Eval, CoverageUnknownUniverseIdThrows) {
  WeightedCoverageObjective f(unit_weights(2));
  const Element bad = cov(0, {7});
  EXPECT_THROW(f.value({&bad}), DataError);
}

TEST(Oracle, EvalBatchExamples) {
  ModularObjective modular;
  InstrumentedOracle oracle(modular);
  const Element e1 = wt(0, 2.0);
  const Element e2 = wt(1, 5.0);
  const std::vector<ElementVec> queries = {{&e1}, {&e2}, {&e1, &e2}};
  const auto vals = oracle.eval_batch(queries);
  ASSERT_EQ(vals.size(), 3u);
  EXPECT_DOUBLE_EQ(vals[0], 2.0);
  EXPECT_DOUBLE_EQ(vals[1], 5.0);
  EXPECT_DOUBLE_EQ(vals[2], 7.0);
  EXPECT_EQ(oracle.query_count(), 3u);
  EXPECT_EQ(oracle.round_count(), 1u);

  const std::vector<ElementVec> empties = {{}, {}};
  const auto zeros = oracle.eval_batch(empties);
  EXPECT_DOUBLE_EQ(zeros[0], 0.0);
  EXPECT_DOUBLE_EQ(zeros[1], 0.0);
}

TEST(Oracle, EvalBatchLogDetDuplicateQuery) {
  LogDetObjective f(1.0);
  InstrumentedOracle oracle(f);
  const Element v = vec(0, {1.0, 2.0});
  const std::vector<ElementVec> queries = {{&v}, {&v}};
  const auto vals = oracle.eval_batch(queries);
  EXPECT_NEAR(vals[0], std::log(2.0), 1e-12);
  EXPECT_EQ(vals[0], vals[1]);
}

TEST(Oracle, EmptyBatchLeavesCountersUntouched) {
  ModularObjective modular;
  InstrumentedOracle oracle(modular);
  const auto vals = oracle.eval_batch({});
  EXPECT_TRUE(vals.empty());
  EXPECT_EQ(oracle.query_count(), 0u);
  EXPECT_EQ(oracle.round_count(), 0u);
}

TEST(Oracle, MarginalExamples) {
  ModularObjective modular;
  InstrumentedOracle oracle(modular);
  const Element a = wt(0, 1.0);
  const Element b = wt(1, 3.0);
  EXPECT_DOUBLE_EQ(oracle.marginal(&b, {&a}), 3.0);
  EXPECT_DOUBLE_EQ(oracle.marginal(&a, {&a}), 0.0);  // already a member
  EXPECT_EQ(oracle.query_count(), 4u);
  EXPECT_EQ(oracle.round_count(), 2u);

  KeywordCoverageObjective keywords;
  InstrumentedOracle kw_oracle(keywords);
  const Element t1 = kw(0, {"a"}, 1.0);
  const Element t2 = kw(1, {"a"}, 1.0);
  EXPECT_NEAR(kw_oracle.marginal(&t2, {&t1}), std::sqrt(2.0) - 1.0, 1e-12);
}

TEST(Oracle, CounterLawOverInterleavedCalls) {
  ModularObjective modular;
  InstrumentedOracle oracle(modular);
  const Element a = wt(0, 1.0);
  const Element b = wt(1, 2.0);
  oracle.eval({&a});                                      // +1q +1r
  oracle.eval_batch(std::vector<ElementVec>{{&a}, {&b}});  // +2q +1r
  oracle.marginal(&b, {&a});                              // +2q +1r
  oracle.eval_batch({});                                  // +0 +0
  oracle.eval({&b});                                      // +1q +1r
  EXPECT_EQ(oracle.query_count(), 6u);
  EXPECT_EQ(oracle.round_count(), 4u);
}

TEST(Oracle, BatchMatchesSequentialBitForBit) {
  KeywordCoverageObjective f;
  InstrumentedOracle oracle(f);
  std::vector<Element> elements;
  Rng rng(7);
  for (std::uint64_t i = 0; i < 12; ++i) {
    elements.push_back(kw(i, {"w" + std::to_string(rng.uniform_below(6)),
                              "w" + std::to_string(rng.uniform_below(6))},
                          1.0 + rng.uniform01()));
  }
  const ElementVec ground = refs(elements);
  std::vector<ElementVec> queries;
  for (int q = 0; q < 8; ++q) {
    queries.push_back(testing::random_subset(ground, rng, 0.5));
  }
  const auto batch = oracle.eval_batch(queries);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    EXPECT_EQ(batch[q], oracle.eval(queries[q]));
  }
}

TEST(Oracle, MixedPayloadVariantsRejected) {
  ModularObjective modular;
  InstrumentedOracle oracle(modular);
  const Element a = wt(0, 1.0);
  const Element b = kw(1, {"x"}, 1.0);
  EXPECT_THROW(oracle.eval({&a, &b}), InvariantError);
}

TEST(Oracle, FeasibilityCapEnforced) {
  ModularObjective modular;
  InstrumentedOracle oracle(modular, 2);
  const Element a = wt(0, 1.0);
  const Element b = wt(1, 1.0);
  const Element c = wt(2, 1.0);
  EXPECT_NO_THROW(oracle.eval({&a, &b}));
  EXPECT_THROW(oracle.eval({&a, &b, &c}), InvariantError);
}

TEST(Oracle, WrongPayloadForObjectiveRejected) {
  LogDetObjective f(1.0);
  InstrumentedOracle oracle(f);
  const Element a = wt(0, 1.0);
  EXPECT_THROW(oracle.eval({&a}), InvariantError);
}

// Value is a function of the set, not of assembly order.
TEST(Oracle, EvaluationIsOrderFree) {
  KeywordCoverageObjective f;
  const Element e1 = kw(3, {"a", "c"}, 2.0);
  const Element e2 = kw(1, {"b"}, 5.0);
  const Element e3 = kw(2, {"a"}, 1.0);
  const double v1 = f.value({&e1, &e2, &e3});
  const double v2 = f.value({&e3, &e1, &e2});
  EXPECT_EQ(v1, v2);
}

}  // namespace
}  // namespace sievestream
