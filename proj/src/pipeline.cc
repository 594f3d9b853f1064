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

#include <algorithm>
#include <fstream>
#include <unistd.h>

#include "clue/parallel.h"
#include "clue/util.h"

namespace clue {

namespace {

int64_t SeedFor(const RunConfig& c, std::string_view stage) {
  return static_cast<int64_t>(SplitSeed(c.seed, stage) >> 1);
}

}  // namespace

std::vector<OutputSample> SampleStage(std::string_view prompt, const RunConfig& c,
                                      Generator& generator, std::string_view seed_stage) {
  return RunStage("sample", [&] {
    GenerationRequest req;
    req.prompt = std::string(prompt);
    req.temperature = c.generation.temperature;
    req.num_samples = c.generation.n;
    req.max_tokens = c.generation.max_tokens;
    req.seed = SeedFor(c, seed_stage);
    req.Validate();
    return generator.Generate(req);
  });
}

ConceptPool ExtractStage(std::span<const OutputSample> samples, const RunConfig& c,
                         const Backends& b, std::string_view seed_stage) {
  return RunStage("extract", [&] {
    ExtractionOptions opt;
    opt.threshold = c.consolidation_threshold;
    opt.rng_seed = SplitSeed(c.seed, seed_stage);
    opt.max_tokens = c.generation.max_tokens;
    opt.workers = c.workers;
    opt.nli_batch_size = c.nli.batch_size;
    return ExtractConcepts(samples, *b.generator, *b.scorer, opt);
  });
}

ScoreMatrix ScoreStage(std::span<const OutputSample> samples, const ConceptPool& pool,
                       const RunConfig& c, NliScorer& scorer) {
  return RunStage("score", [&] {
    return ComputeScoreMatrix(samples, pool, scorer, {c.workers, c.nli.batch_size});
  });
}

UncertaintyReport UncertaintyStage(const ScoreMatrix& matrix, const RunConfig& c) {
  return RunStage("uncertainty", [&] { return ComputeUncertaintyReport(matrix, c.epsilon); });
}

RunArtifacts RunPipeline(std::string_view prompt, const RunConfig& c, const Backends& b) {
  RunStage("config", [&] { c.Validate(); });
  RunArtifacts a;
  a.samples = SampleStage(prompt, c, *b.generator);
  a.pool = ExtractStage(a.samples, c, b);
  a.matrix = ScoreStage(a.samples, a.pool, c, *b.scorer);
  a.report = UncertaintyStage(a.matrix, c);
  return a;
}

std::vector<std::pair<std::string, std::string>> ArtifactFiles(const RunArtifacts& a,
                                                               const RunConfig& c) {
  return {{"samples.jsonl", SerializeSamples(a.samples)},
          {"pool.jsonl", SerializePool(a.pool)},
          {"matrix.json", SerializeMatrix(a.matrix)},
          {"uncertainty.json", SerializeUncertaintyReport(a.report)},
          {"config.json", ToJson(c).dump(1) + "\n"}};
}

std::string ManifestJson(std::span<const std::pair<std::string, std::string>> files) {
  std::vector<std::pair<std::string, std::string>> sorted(files.begin(), files.end());
  std::sort(sorted.begin(), sorted.end());
  Json arr = Json::array();
  for (const auto& [name, content] : sorted) {
    arr.push_back({{"name", name}, {"sha256", Sha256Hex(content)}, {"bytes", content.size()}});
  }
  return Json{{"layout_version", 1}, {"artifacts", arr}}.dump(1) + "\n";
}

void WriteArtifactDir(const std::filesystem::path& dir,
                      std::span<const std::pair<std::string, std::string>> files) {
  namespace fs = std::filesystem;
  const fs::path target = fs::absolute(dir);
  const fs::path tmp = target.parent_path() /
                       ("." + target.filename().string() + ".tmp-" +
                        std::to_string(::getpid()));
  try {
    fs::create_directories(target.parent_path());
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    for (const auto& [name, content] : files) {
      std::ofstream out(tmp / name, std::ios::binary);
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      if (!out) throw Error(ErrorKind::kIo, "cannot write " + (tmp / name).string());
    }
    {
      const std::string manifest = ManifestJson(files);
      std::ofstream out(tmp / "manifest.json", std::ios::binary);
      out << manifest;
      if (!out) throw Error(ErrorKind::kIo, "cannot write manifest");
    }
    if (fs::exists(target)) fs::remove_all(target);
    fs::rename(tmp, target);
  } catch (const fs::filesystem_error& e) {
    std::error_code ignored;
    fs::remove_all(tmp, ignored);
    throw Error(ErrorKind::kIo, e.what());
  } catch (...) {
    std::error_code ignored;
    fs::remove_all(tmp, ignored);
    throw;
  }
}

InstanceResult RunInstance(const QAInstance& inst, const RunConfig& c, const Backends& b,
                           size_t inner_workers) {
  RunConfig local = c;
  local.workers = inner_workers;
  try {
    InstanceResult r;
    r.id = inst.id;
    r.question = inst.question;
    const auto samples =
        SampleStage(local.RenderPrompt(inst.question), local, *b.generator, "sample:" + inst.id);
    const ConceptPool pool = ExtractStage(samples, local, b, "consolidate:" + inst.id);
    const ScoreMatrix matrix = ScoreStage(samples, pool, local, *b.scorer);
    r.uncertainty = UncertaintyStage(matrix, local).Values();
    for (const auto& concept_ : pool.concepts) {
      r.concept_ids.push_back(concept_.id);
      r.concept_texts.push_back(concept_.text);
    }
    RunStage("answer-score", [&] {
      const ScoringOptions opt{local.workers, local.nli.batch_size};
      for (const auto& a : inst.answers) {
        r.answer_scores[a.role] =
            ComputeAnswerScores(a.text, pool, *b.scorer, a.role, opt).scores;
      }
      r.question_relevance = ComputeQuestionRelevance(inst.question, pool, *b.scorer, opt);
    });
    return r;
  } catch (const StageError& e) {
    throw StageError(e.stage(), Error(e.kind(), "instance " + inst.id + ": " + e.what()));
  }
}

DatasetRun RunDataset(std::span<const RawInstance> raw, DatasetKind kind,
                      const RunConfig& c, const Backends& b) {
  RunStage("config", [&] { c.Validate(); });
  const SubsetBuild subsets =
      RunStage("ingest", [&] { return BuildSubsets(raw, kind, SplitSeed(c.seed, "subsets")); });
  DatasetRun run;
  run.dataset_kind = std::string(DatasetKindName(kind));
  run.seed = c.seed;
  run.skipped_instances = subsets.skipped;
  run.instances.resize(subsets.instances.size());
  ParallelFor(subsets.instances.size(), c.workers, [&](size_t i) {
    run.instances[i] = RunInstance(subsets.instances[i], c, b, 1);
  });
  return run;
}

Json DetectionReport(const DatasetRun& run, const Thresholds& t) {
  Json methods = Json::object();
  for (auto method : {DetectionMethod::kUncertainty, DetectionMethod::kQuestionBaseline}) {
    try {
      methods[std::string(DetectionMethodName(method))] =
          ToJson(EvaluateDetection(run.instances, t, method));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kEvaluationEmpty) throw;
      methods[std::string(DetectionMethodName(method))] = {
          {"error", {{"kind", ErrorKindName(e.kind())}, {"message", e.what()}}}};
    }
  }
  return {{"dataset_kind", run.dataset_kind},
          {"seed", run.seed},
          {"theta_h", t.high},
          {"theta_l", t.low},
          {"instances", run.instances.size()},
          {"skipped_instances", run.skipped_instances},
          {"detection", methods},
          {"correlation", ToJson(RunCorrelationStudy(run.instances))}};
}

}  // namespace clue
