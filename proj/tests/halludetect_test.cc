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

#include "clue/halludetect.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "clue/error.h"
#include "test_support.h"

namespace clue {
namespace {

RawInstance Raw(const std::string& id, std::vector<RawAnswer> answers) {
  return {id, "question " + id, std::move(answers)};
}
RawAnswer Scored(const std::string& t, double s) { return {t, s, std::nullopt}; }
RawAnswer Labeled(const std::string& t, const std::string& l) { return {t, std::nullopt, l}; }

TEST(ParseRawDataset, SchemaErrorsNameTheLine) {
  const std::string ok = R"({"id":"a","question":"q","answers":[{"text":"t","score":1.5,"label":null}]})";
  EXPECT_EQ(ParseRawDataset(ok + "\n\n").size(), 1u);
  try {
    ParseRawDataset(ok + "\n" + R"({"id":"b","answers":[]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSchema);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(ParseRawDataset(ok + "\n" + ok), Error);
}

TEST(BuildSubsets, Eli5PicksHighestAndLowestScore) {
  const std::vector<RawInstance> raw = {
      Raw("a", {Scored("a1", 3), Scored("a2", 9), Scored("a3", 9), Scored("a4", 1)}),
      Raw("b", {Scored("b1", 5), Scored("b2", 2)}),
      Raw("c", {Scored("c1", 5)}),
  };
  const SubsetBuild b = BuildSubsets(raw, DatasetKind::kEli5, 1);
  ASSERT_EQ(b.instances.size(), 2u);
  EXPECT_EQ(b.skipped, 1u);
  const QAInstance& a = b.instances[0];
  EXPECT_EQ(a.Find(AnswerRole::kRelevant)->text, "a2");
  EXPECT_EQ(a.Find(AnswerRole::kLessRelevant)->text, "a4");
  const QAAnswer* irr = a.Find(AnswerRole::kIrrelevant);
  ASSERT_NE(irr, nullptr);
  EXPECT_NE(irr->source_id, "a");
}

TEST(BuildSubsets, WikiQaNeedsBothLabels) {
  const std::vector<RawInstance> raw = {
      Raw("a", {Labeled("a1", "correct"), Labeled("a2", "0"), Labeled("a3", "incorrect")}),
      Raw("b", {Labeled("b1", "incorrect")}),
  };
  const SubsetBuild b = BuildSubsets(raw, DatasetKind::kWikiQa, 1);
  ASSERT_EQ(b.instances.size(), 1u);
  EXPECT_EQ(b.skipped, 1u);
  EXPECT_EQ(b.instances[0].Find(AnswerRole::kRelevant)->text, "a1");
  const std::string less = b.instances[0].Find(AnswerRole::kLessRelevant)->text;
  EXPECT_TRUE(less == "a2" || less == "a3");
  EXPECT_EQ(b.instances[0].Find(AnswerRole::kIrrelevant)->text, "b1");
}

TEST(BuildSubsets, QnliSingleLabelYieldsOnlyThatRole) {
  const std::vector<RawInstance> raw = {
      Raw("a", {Labeled("a1", "entailment")}),
      Raw("b", {Labeled("b1", "not entailment"), Labeled("b2", "not-entailment")}),
  };
  const SubsetBuild b = BuildSubsets(raw, DatasetKind::kQnli, 4);
  ASSERT_EQ(b.instances.size(), 2u);
  EXPECT_NE(b.instances[0].Find(AnswerRole::kRelevant), nullptr);
  EXPECT_EQ(b.instances[0].Find(AnswerRole::kLessRelevant), nullptr);
  EXPECT_EQ(b.instances[1].Find(AnswerRole::kRelevant), nullptr);
  EXPECT_NE(b.instances[1].Find(AnswerRole::kLessRelevant), nullptr);
  EXPECT_THROW(BuildSubsets(std::vector<RawInstance>{Raw("x", {Labeled("t", "maybe")})},
                            DatasetKind::kQnli, 1),
               Error);
}

TEST(BuildSubsets, SeededAndNeverSelfIrrelevant) {
  std::vector<RawInstance> raw;
  for (int i = 0; i < 30; ++i) {
    raw.push_back(Raw("q" + std::to_string(i),
                      {Labeled("yes " + std::to_string(i), "entailment"),
                       Labeled("no " + std::to_string(i), "not_entailment")}));
  }
  const SubsetBuild a = BuildSubsets(raw, DatasetKind::kQnli, 99);
  const SubsetBuild b = BuildSubsets(raw, DatasetKind::kQnli, 99);
  const SubsetBuild c = BuildSubsets(raw, DatasetKind::kQnli, 100);
  bool differs = false;
  for (size_t i = 0; i < a.instances.size(); ++i) {
    const auto* ia = a.instances[i].Find(AnswerRole::kIrrelevant);
    EXPECT_EQ(ia->text, b.instances[i].Find(AnswerRole::kIrrelevant)->text);
    EXPECT_NE(ia->source_id, a.instances[i].id);
    differs |= ia->text != c.instances[i].Find(AnswerRole::kIrrelevant)->text;
  }
  EXPECT_TRUE(differs);
}

TEST(Labels, ThresholdRule) {
  const Thresholds t;
  EXPECT_EQ(LabelForScore(0.95, t), kEntailed);
  EXPECT_EQ(LabelForScore(0.9, t), kExcluded);
  EXPECT_EQ(LabelForScore(0.05, t), kHallucinated);
  EXPECT_EQ(LabelForScore(0.1, t), kExcluded);
  EXPECT_THROW((Thresholds{0.3, 0.3}.Validate()), Error);
  EXPECT_THROW((Thresholds{1.1, 0.3}.Validate()), Error);
}

TEST(Labels, TighteningNeverFlipsClass) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double s = u(rng);
    const int loose = LabelForScore(s, {0.7, 0.3});
    const int tight = LabelForScore(s, {0.9, 0.1});
    if (tight != kExcluded) EXPECT_EQ(tight, loose);
  }
}

TEST(LabelConcepts, RelevantOnly) {
  AnswerScores a{AnswerRole::kLessRelevant, {"c0"}, {0.95}};
  const std::vector<double> u = {0.1};
  EXPECT_THROW(LabelConcepts(a, u, {}), Error);
  a.role = AnswerRole::kRelevant;
  const auto l = LabelConcepts(a, u, {});
  EXPECT_EQ(l[0].label, kEntailed);
  EXPECT_DOUBLE_EQ(l[0].uncertainty, 0.1);
}

InstanceResult Inst(const std::string& id, std::vector<double> u, std::vector<double> s) {
  InstanceResult r;
  r.id = id;
  for (size_t j = 0; j < u.size(); ++j) r.concept_ids.push_back("c" + std::to_string(j));
  r.uncertainty = std::move(u);
  r.question_relevance.assign(r.uncertainty.size(), 0.5);
  r.answer_scores[AnswerRole::kRelevant] = std::move(s);
  return r;
}

TEST(Correlation, MeanExcludesUndefinedInstances) {
  std::vector<InstanceResult> rs = {Inst("a", {0.1, 1, 2}, {0.9, 0.4, 0.1}),
                                    Inst("b", {0.1, 1, 2}, {0.5, 0.5, 0.5}),
                                    Inst("c", {1}, {0.5})};
  const CorrelationStudy s = RunCorrelationStudy(rs);
  const auto& rel = s.For(AnswerRole::kRelevant);
  EXPECT_EQ(rel.valid, 1u);
  EXPECT_EQ(rel.excluded, 2u);
  EXPECT_DOUBLE_EQ(*rel.mean, Pearson(rs[0].uncertainty, rs[0].answer_scores[AnswerRole::kRelevant]));
  EXPECT_FALSE(s.For(AnswerRole::kIrrelevant).mean.has_value());
  EXPECT_NE(RenderCorrelationTable(s, "toy").find("n/a"), std::string::npos);
}

TEST(Correlation, ExactLogRelationIsStronglyNegative) {
  std::vector<double> s = {0.95, 0.8, 0.6, 0.4, 0.2, 0.05};
  std::vector<double> u;
  for (double x : s) u.push_back(-std::log(x));
  const CorrelationStudy st = RunCorrelationStudy(std::vector<InstanceResult>{Inst("a", u, s)});
  EXPECT_LT(*st.For(AnswerRole::kRelevant).mean, -0.9);
}

TEST(Detection, PerfectSeparationGivesOne) {
  const std::vector<InstanceResult> rs = {Inst("a", {0.1, 0.2, 3.0, 4.0}, {0.99, 0.95, 0.01, 0.02})};
  const DetectionMetrics m = EvaluateDetection(rs, {}, DetectionMethod::kUncertainty);
  EXPECT_DOUBLE_EQ(m.macro_auroc, 1.0);
  EXPECT_DOUBLE_EQ(m.micro_auroc, 1.0);
  EXPECT_DOUBLE_EQ(m.macro_auprc, 1.0);
  EXPECT_EQ(m.labeled_concepts, 4u);
}

TEST(Detection, SkipsSingleClassAndCountsExclusions) {
  const std::vector<InstanceResult> rs = {Inst("a", {0.1, 3.0, 1.0}, {0.99, 0.01, 0.5}),
                                          Inst("b", {0.1, 0.2}, {0.99, 0.98})};
  const DetectionMetrics m = EvaluateDetection(rs, {}, DetectionMethod::kUncertainty);
  EXPECT_EQ(m.per_instance.size(), 1u);
  EXPECT_EQ(m.skipped_instances, 1u);
  EXPECT_EQ(m.excluded_concepts, 1u);
  EXPECT_EQ(m.labeled_concepts, 4u);
  try {
    EvaluateDetection(std::vector<InstanceResult>{rs[1]}, {}, DetectionMethod::kUncertainty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEvaluationEmpty);
  }
}

TEST(Detection, BaselineUsesNegatedQuestionRelevance) {
  InstanceResult r = Inst("a", {0, 0, 0, 0}, {0.99, 0.95, 0.01, 0.02});
  r.question_relevance = {0.9, 0.8, 0.2, 0.1};
  const DetectionMetrics m =
      EvaluateDetection(std::vector<InstanceResult>{r}, {}, DetectionMethod::kQuestionBaseline);
  EXPECT_DOUBLE_EQ(m.macro_auroc, 1.0);
}

TEST(Detection, MacroIsPermutationInvariant) {
  const auto run = ParseDatasetRun(ReadFile(testing::DataPath("sweep_fixture_run.json")));
  auto shuffled = run.instances;
  std::reverse(shuffled.begin(), shuffled.end());
  const auto a = EvaluateDetection(run.instances, {}, DetectionMethod::kUncertainty);
  const auto b = EvaluateDetection(shuffled, {}, DetectionMethod::kUncertainty);
  EXPECT_EQ(a.macro_auroc, b.macro_auroc);
  EXPECT_EQ(a.micro_auprc, b.micro_auprc);
}

TEST(Detection, MatchesScikitLearnOnFrozenRun) {
  const auto run = ParseDatasetRun(ReadFile(testing::GoldenPath("qnli_run_seed3.json")));
  const Json oracle = Json::parse(ReadFile(testing::GoldenPath("qnli_detect_sklearn.json")));
  for (auto method : {DetectionMethod::kUncertainty, DetectionMethod::kQuestionBaseline}) {
    const Json& o = oracle[std::string(DetectionMethodName(method))];
    const auto m = EvaluateDetection(run.instances, {}, method);
    EXPECT_NEAR(m.macro_auroc, o["macro_auroc"].get<double>(), 1e-12);
    EXPECT_NEAR(m.macro_auprc, o["macro_auprc"].get<double>(), 1e-12);
    EXPECT_NEAR(m.micro_auroc, o["micro_auroc"].get<double>(), 1e-12);
    EXPECT_NEAR(m.micro_auprc, o["micro_auprc"].get<double>(), 1e-12);
    EXPECT_EQ(m.per_instance.size(), o["evaluated_instances"].get<size_t>());
    EXPECT_EQ(m.labeled_concepts, o["labeled_concepts"].get<size_t>());
  }
}

TEST(DatasetRun, RoundTrip) {
  const std::string text = ReadFile(testing::GoldenPath("qnli_run_seed3.json"));
  EXPECT_EQ(SerializeDatasetRun(ParseDatasetRun(text)), text);
}

TEST(Sweep, RowsCurvesAndBoundary) {
  const auto run = ParseDatasetRun(ReadFile(testing::DataPath("sweep_fixture_run.json")));
  const std::vector<Thresholds> pairs = {{0.9, 0.1}, {0.7, 0.3}, {1.0, 0.0}};
  const auto rows = ThresholdSweep(run.instances, pairs, DetectionMethod::kUncertainty);
  ASSERT_EQ(rows.size(), 3u);
  ASSERT_TRUE(rows[0].metrics.has_value());
  EXPECT_GE(rows[0].metrics->macro_auroc, rows[1].metrics->macro_auroc);
  EXPECT_FALSE(rows[2].metrics.has_value());
  EXPECT_NE(rows[2].error.find("evaluation_empty"), std::string::npos) << rows[2].error;
  const std::string csv = SweepCurvesCsv(rows);
  EXPECT_EQ(csv.rfind("theta_h,theta_l,curve,x,y\n", 0), 0u);
  EXPECT_NE(csv.find("0.9,0.1,roc,0,0\n"), std::string::npos);
  EXPECT_NE(csv.find(",pr,"), std::string::npos);
}

TEST(Sweep, SinglePairEqualsDetection) {
  const auto run = ParseDatasetRun(ReadFile(testing::DataPath("sweep_fixture_run.json")));
  const std::vector<Thresholds> pairs = {{0.8, 0.2}};
  const auto rows = ThresholdSweep(run.instances, pairs, DetectionMethod::kUncertainty);
  const auto m = EvaluateDetection(run.instances, pairs[0], DetectionMethod::kUncertainty);
  EXPECT_EQ(ToJson(*rows[0].metrics), ToJson(m));
}

TEST(ParseThresholdPairs, Formats) {
  EXPECT_EQ(ParseThresholdPairs("0.9:0.1, 0.7:0.3"),
            (std::vector<Thresholds>{{0.9, 0.1}, {0.7, 0.3}}));
  EXPECT_THROW(ParseThresholdPairs(""), Error);
  EXPECT_THROW(ParseThresholdPairs("0.9-0.1"), Error);
  EXPECT_THROW(ParseThresholdPairs("0.1:0.9"), Error);
  EXPECT_THROW(ParseThresholdPairs("0.9x:0.1"), Error);
}

}  // namespace
}  // namespace clue
