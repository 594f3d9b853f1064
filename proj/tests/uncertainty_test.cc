// Copyright 2026 The CLUE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clue/uncertainty.h"

#include <gtest/gtest.h>

#include <cmath>

#include "clue/error.h"
#include "clue/mock_backends.h"
#include "test_support.h"

namespace clue {
namespace {

TEST(ConceptUncertainty, WorkedValues) {
  const std::vector<double> ones(5, 1.0);
  EXPECT_EQ(ConceptUncertainty(ones), 0.0);
  EXPECT_FALSE(std::signbit(ConceptUncertainty(ones)));
  const std::vector<double> e(3, std::exp(-1.0));
  EXPECT_DOUBLE_EQ(ConceptUncertainty(e), 1.0);
  EXPECT_NEAR(ConceptUncertainty(std::vector<double>{0.9, 0.8, 0.7, 0.6, 0.5}), 0.37783, 1e-5);
}

TEST(ConceptUncertainty, ZeroScoresClampToEpsilon) {
  const std::vector<double> zeros(4, 0.0);
  EXPECT_NEAR(ConceptUncertainty(zeros), -std::log(1e-12), 1e-12);
  EXPECT_NEAR(ConceptUncertainty(zeros, 1e-6), -std::log(1e-6), 1e-12);
}

TEST(ConceptUncertainty, Preconditions) {
  EXPECT_THROW(ConceptUncertainty(std::vector<double>{}), Error);
  EXPECT_THROW(ConceptUncertainty(std::vector<double>{0.5}, 0.0), Error);
  EXPECT_THROW(ConceptUncertainty(std::vector<double>{0.5}, 0.01), Error);
}

TEST(ConceptUncertainty, MonotoneInEachScore) {
  std::vector<double> s = {0.2, 0.4, 0.6};
  const double base = ConceptUncertainty(s);
  s[1] = 0.5;
  EXPECT_LT(ConceptUncertainty(s), base);
}

UncertaintyReport AppleReport() {
  const auto samples = ParseSamples(ReadFile(testing::GoldenPath("apple_samples_seed7.jsonl")));
  const ConceptPool pool = ParsePool(ReadFile(testing::GoldenPath("apple_pool_seed7.jsonl")));
  MockNliScorer nli;
  return ComputeUncertaintyReport(ComputeScoreMatrix(samples, pool, nli));
}

TEST(UncertaintyReport, MatchesFrozenGolden) {
  EXPECT_EQ(SerializeUncertaintyReport(AppleReport()),
            ReadFile(testing::GoldenPath("apple_uncertainty_seed7.json")));
}

TEST(UncertaintyReport, RankedDescendingWithIdTies) {
  UncertaintyReport r;
  r.entries = {{"c2", "b", 0.5}, {"c1", "a", 0.5}, {"c0", "z", 2.0}};
  const auto ranked = r.Ranked();
  EXPECT_EQ(ranked[0].id, "c0");
  EXPECT_EQ(ranked[1].id, "c1");
  EXPECT_EQ(ranked[2].id, "c2");
}

TEST(UncertaintyReport, ParseRestoresPoolOrder) {
  const UncertaintyReport r = AppleReport();
  const UncertaintyReport back = ParseUncertaintyReport(SerializeUncertaintyReport(r));
  ASSERT_EQ(back.entries.size(), r.entries.size());
  for (size_t j = 0; j < r.entries.size(); ++j) EXPECT_EQ(back.entries[j].id, r.entries[j].id);
  const ConceptPool pool = ParsePool(ReadFile(testing::GoldenPath("apple_pool_seed7.jsonl")));
  EXPECT_NO_THROW(CheckAgainstPool(back, pool));
}

TEST(UncertaintyReport, BoundedByEpsilon) {
  for (const auto& e : AppleReport().entries) {
    EXPECT_GE(e.uncertainty, 0.0);
    EXPECT_LE(e.uncertainty, -std::log(1e-12));
  }
}

TEST(RenderUncertaintyTable, ThreeDecimals) {
  UncertaintyReport r;
  r.num_samples = 5;
  r.entries = {{"c0", "Co-founders", 0.0084}, {"c1", "Garage", 6.4}};
  const std::string t = RenderUncertaintyTable(r);
  EXPECT_NE(t.find("6.400"), std::string::npos);
  EXPECT_NE(t.find("0.008"), std::string::npos);
  EXPECT_LT(t.find("Garage"), t.find("Co-founders"));
}

}  // namespace
}  // namespace clue
