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

#include "clue/diversity.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "clue/error.h"
#include "clue/mock_backends.h"
#include "test_support.h"

namespace clue {
namespace {

ScoreMatrix Matrix(std::vector<std::vector<double>> v) {
  ScoreMatrix m;
  for (size_t i = 0; i < v.size(); ++i) m.rows.push_back(static_cast<int>(i));
  for (size_t j = 0; j < v[0].size(); ++j) {
    m.cols.push_back("l" + std::to_string(j));
    m.col_texts.push_back("t" + std::to_string(j));
  }
  m.values = std::move(v);
  return m;
}

ClassCounts Counts(std::vector<size_t> n) {
  ClassCounts c;
  for (size_t j = 0; j < n.size(); ++j) c.ids.push_back("l" + std::to_string(j));
  for (size_t x : n) c.total += x;
  c.counts = std::move(n);
  return c;
}

TEST(Hierarchy, ParseAndValidate) {
  const auto h = ParseHierarchy(ReadFile(testing::DataPath("tone_hierarchy.json")));
  EXPECT_EQ(h.upper, "tone");
  EXPECT_EQ(h.lower.size(), 5u);
  EXPECT_EQ(h.AsPool().concepts[4].id, "l4");
  EXPECT_THROW(ParseHierarchy(R"({"upper":"x","lower":["a"]})"), Error);
  EXPECT_THROW(ParseHierarchy(R"({"upper":"x","lower":["a","a"]})"), Error);
  EXPECT_THROW(ParseHierarchy(R"({"lower":["a","b"]})"), Error);
}

TEST(Classify, ArgmaxWithLowestColumnTies) {
  EXPECT_EQ(Classify(Matrix({{0.9, 0.1}, {0.2, 0.8}, {0.6, 0.4}})).counts, (std::vector<size_t>{2, 1}));
  EXPECT_EQ(Classify(Matrix({{0.5, 0.5}, {0.3, 0.3}})).counts, (std::vector<size_t>{2, 0}));
  EXPECT_EQ(Classify(Matrix({{0.1, 0.7, 0.2}, {0.1, 0.7, 0.2}, {0.1, 0.7, 0.2}})).counts,
            (std::vector<size_t>{0, 3, 0}));
}

TEST(Classify, MatchesRowScanOracle) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::vector<double>> v(10, std::vector<double>(4));
    std::vector<size_t> expect(4, 0);
    for (auto& row : v) {
      for (auto& x : row) x = std::round(u(rng) * 4) / 4;
      size_t best = 0;
      for (size_t j = 1; j < 4; ++j) {
        if (row[j] > row[best]) best = j;
      }
      ++expect[best];
    }
    const ClassCounts c = Classify(Matrix(v));
    EXPECT_EQ(c.counts, expect);
    EXPECT_EQ(c.total, 10u);
  }
}

TEST(Classify, DuplicateRowIncrementsOneCount) {
  auto v = std::vector<std::vector<double>>{{0.2, 0.9}, {0.7, 0.1}};
  const auto before = Classify(Matrix(v)).counts;
  v.push_back(v[0]);
  const auto after = Classify(Matrix(v)).counts;
  EXPECT_EQ(after[0], before[0]);
  EXPECT_EQ(after[1], before[1] + 1);
}

TEST(Classify, HierarchyMismatch) {
  ConceptHierarchy h{"tone", {"a", "b"}};
  EXPECT_THROW(Classify(Matrix({{0.1, 0.2}}), h), Error);
}

TEST(HarmonicMean, Values) {
  EXPECT_NEAR(HarmonicMeanDiversity(std::vector<double>{0.7, 0.7, 0.7}), 0.7, 1e-15);
  EXPECT_DOUBLE_EQ(HarmonicMeanDiversity(std::vector<double>{2.5}), 2.5);
  EXPECT_NEAR(HarmonicMeanDiversity(std::vector<double>{0.037, 7.216, 0.284, 2.949, 0.241}),
              0.142146, 1e-6);
}

TEST(HarmonicMean, ZeroIsDegenerate) {
  std::string warning;
  EXPECT_EQ(HarmonicMeanDiversity(std::vector<double>{0.0, 1.0}, &warning), 0.0);
  EXPECT_FALSE(warning.empty());
  EXPECT_THROW(HarmonicMeanDiversity(std::vector<double>{}), Error);
  EXPECT_THROW(HarmonicMeanDiversity(std::vector<double>{-1.0}), Error);
}

TEST(HarmonicMean, CappedByMinDominance) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.001, 10.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(2 + rng() % 6);
    for (auto& x : v) x = u(rng);
    const double h = HarmonicMeanDiversity(v);
    EXPECT_LE(h, v.size() * *std::min_element(v.begin(), v.end()) + 1e-12);
    EXPECT_LE(h, *std::max_element(v.begin(), v.end()) + 1e-12);
  }
}

TEST(Entropy, Values) {
  EXPECT_DOUBLE_EQ(EntropyDiversity(Counts({5, 0, 0, 0, 0})), 0.0);
  EXPECT_NEAR(EntropyDiversity(Counts({1, 1, 1, 1, 1})), std::log(5.0), 1e-15);
  EXPECT_NEAR(EntropyDiversity(Counts({3, 2})), 0.67301, 1e-5);
  EXPECT_THROW(EntropyDiversity(Counts({0, 0})), Error);
}

TEST(Entropy, BoundsAndPermutationInvariance) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    std::vector<size_t> n(2 + rng() % 5);
    for (auto& x : n) x = rng() % 6;
    n[0] += 1;
    const double h = EntropyDiversity(Counts(n));
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log(static_cast<double>(n.size())) + 1e-12);
    auto p = n;
    std::shuffle(p.begin(), p.end(), rng);
    EXPECT_NEAR(EntropyDiversity(Counts(p)), h, 1e-12);
  }
}

TEST(StoryCorpus, ParseAndErrors) {
  const auto c = ParseStoryCorpus(ReadFile(testing::DataPath("stories_uniform.jsonl")));
  EXPECT_EQ(c.size(), 10u);
  EXPECT_EQ(c[0].intended_class, "happy");
  EXPECT_THROW(ParseStoryCorpus(""), Error);
  EXPECT_THROW(ParseStoryCorpus(R"({"intended_class":"x"})"), Error);
}

DiversityReport RunFixture(const std::string& corpus_file) {
  const auto h = ParseHierarchy(ReadFile(testing::DataPath("tone_hierarchy.json")));
  const auto corpus = ParseStoryCorpus(ReadFile(testing::DataPath(corpus_file)));
  MockNliScorer nli;
  return RunDiversity(CorpusSamples(corpus), corpus, h, nli);
}

TEST(RunDiversity, UniformCorpusGolden) {
  const DiversityReport r = RunFixture("stories_uniform.jsonl");
  EXPECT_EQ(r.counts.counts, (std::vector<size_t>{2, 2, 2, 2, 2}));
  EXPECT_NEAR(r.entropy, std::log(5.0), 1e-12);
  EXPECT_EQ(SerializeDiversityReport(r), ReadFile(testing::GoldenPath("diversity_uniform.json")));
}

TEST(RunDiversity, SingleClassCorpusGolden) {
  const DiversityReport r = RunFixture("stories_single.jsonl");
  EXPECT_EQ(r.counts.counts[0], 10u);
  EXPECT_EQ(r.entropy, 0.0);
  EXPECT_LT(r.harmonic, RunFixture("stories_uniform.jsonl").harmonic);
  EXPECT_NEAR(r.harmonic, HarmonicMeanDiversity(r.uncertainty.Values()), 1e-15);
  EXPECT_EQ(SerializeDiversityReport(r), ReadFile(testing::GoldenPath("diversity_single.json")));
}

}  // namespace
}  // namespace clue
