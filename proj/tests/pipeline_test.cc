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

#include "clue/pipeline.h"

#include <gtest/gtest.h>

#include "clue/error.h"
#include "test_support.h"

namespace clue {
namespace {

constexpr char kApple[] = "Who is the founder of Apple?";

RunConfig QaConfig() {
  RunConfig c;
  c.seed = 3;
  c.generation.mock_corpus = testing::DataPath("qa_mock_corpus.jsonl").string();
  return c;
}

TEST(RunPipeline, DeterministicAcrossRunsAndWorkers) {
  RunConfig c;
  c.seed = 7;
  const RunArtifacts a = RunPipeline(c.RenderPrompt(kApple), c, MakeBackends(c));
  c.workers = 1;
  c.nli.batch_size = 16;
  const RunArtifacts b = RunPipeline(c.RenderPrompt(kApple), c, MakeBackends(c));
  for (size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(ArtifactFiles(a, c)[k], ArtifactFiles(b, c)[k]);
  }
}

TEST(RunPipeline, MatchesFrozenAppleArtifacts) {
  RunConfig c;
  c.seed = 7;
  const RunArtifacts a = RunPipeline(c.RenderPrompt(kApple), c, MakeBackends(c));
  EXPECT_EQ(SerializeSamples(a.samples), ReadFile(testing::GoldenPath("apple_samples_seed7.jsonl")));
  EXPECT_EQ(SerializePool(a.pool), ReadFile(testing::GoldenPath("apple_pool_seed7.jsonl")));
  EXPECT_EQ(SerializeUncertaintyReport(a.report),
            ReadFile(testing::GoldenPath("apple_uncertainty_seed7.json")));
}

TEST(RunPipeline, SeedChangesSampling) {
  RunConfig c;
  c.seed = 7;
  const auto a = RunPipeline(c.RenderPrompt(kApple), c, MakeBackends(c));
  c.seed = 8;
  const auto b = RunPipeline(c.RenderPrompt(kApple), c, MakeBackends(c));
  EXPECT_NE(SerializeSamples(a.samples), SerializeSamples(b.samples));
}

TEST(RunPipeline, InvalidConfigFailsBeforeAnyStage) {
  RunConfig c;
  c.theta_l = 0.95;
  try {
    RunPipeline("p", c, MakeBackends(RunConfig{}));
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "config");
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

TEST(RunPipeline, StageErrorsNameTheStage) {
  RunConfig c;
  c.nli.max_chars = 20;
  try {
    RunPipeline(c.RenderPrompt(kApple), c, MakeBackends(c));
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "extract");
    EXPECT_EQ(e.kind(), ErrorKind::kInputTooLong);
  }
}

TEST(WriteArtifactDir, ManifestAndReplacement) {
  const auto root = testing::TempDir("artifacts");
  RunConfig c;
  const RunArtifacts a = RunPipeline(c.RenderPrompt(kApple), c, MakeBackends(c));
  const auto files = ArtifactFiles(a, c);
  WriteArtifactDir(root / "out", files);
  WriteArtifactDir(root / "out", files);
  size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(root)) {
    (void)e;
    ++n;
  }
  EXPECT_EQ(n, 1u);
  const Json manifest = Json::parse(ReadFile(root / "out" / "manifest.json"));
  EXPECT_EQ(manifest["layout_version"], 1);
  ASSERT_EQ(manifest["artifacts"].size(), 5u);
  for (const auto& art : manifest["artifacts"]) {
    const std::string body = ReadFile(root / "out" / art["name"].get<std::string>());
    EXPECT_EQ(art["sha256"], Sha256Hex(body));
  }
  const Json report = Json::parse(ReadFile(root / "out" / "uncertainty.json"));
  EXPECT_EQ(report["provenance"]["matrix_hash"], Sha256Hex(ReadFile(root / "out" / "matrix.json")));
  EXPECT_EQ(report["provenance"]["pool_hash"], Sha256Hex(ReadFile(root / "out" / "pool.jsonl")));
}

TEST(RunDataset, ParallelEqualsSerialAndGolden) {
  RunConfig c = QaConfig();
  const auto raw = ParseRawDataset(ReadFile(testing::DataPath("qnli_fixture.jsonl")));
  const DatasetRun par = RunDataset(raw, DatasetKind::kQnli, c, MakeBackends(c));
  c.workers = 1;
  const DatasetRun ser = RunDataset(raw, DatasetKind::kQnli, c, MakeBackends(c));
  EXPECT_EQ(SerializeDatasetRun(par), SerializeDatasetRun(ser));
  EXPECT_EQ(SerializeDatasetRun(par), ReadFile(testing::GoldenPath("qnli_run_seed3.json")));
}

TEST(RunDataset, DetectionReportGolden) {
  const RunConfig c = QaConfig();
  const auto run = ParseDatasetRun(ReadFile(testing::GoldenPath("qnli_run_seed3.json")));
  EXPECT_EQ(DetectionReport(run, {c.theta_h, c.theta_l}).dump(1) + "\n",
            ReadFile(testing::GoldenPath("qnli_detect_seed3.json")));
}

TEST(RunDataset, AllKindsRunOnFixtures) {
  const RunConfig c = QaConfig();
  const Backends b = MakeBackends(c);
  for (const auto& [file, kind, expect, skipped] :
       {std::tuple{"wikiqa_fixture.jsonl", DatasetKind::kWikiQa, 3u, 1u},
        std::tuple{"eli5_fixture.jsonl", DatasetKind::kEli5, 2u, 1u}}) {
    const DatasetRun r = RunDataset(ParseRawDataset(ReadFile(testing::DataPath(file))), kind, c, b);
    EXPECT_EQ(r.instances.size(), expect) << file;
    EXPECT_EQ(r.skipped_instances, skipped) << file;
    for (const auto& inst : r.instances) {
      EXPECT_EQ(inst.uncertainty.size(), inst.concept_ids.size());
      EXPECT_EQ(inst.question_relevance.size(), inst.concept_ids.size());
      EXPECT_EQ(inst.answer_scores.size(), 3u);
    }
  }
}

}  // namespace
}  // namespace clue
