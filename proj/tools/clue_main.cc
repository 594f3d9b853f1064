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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "clue/config.h"
#include "clue/diversity.h"
#include "clue/halludetect.h"
#include "clue/pipeline.h"
#include "clue/util.h"

namespace {

using namespace clue;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct CommonFlags {
  std::optional<std::string> config;
  std::optional<uint64_t> seed;
  std::optional<size_t> workers;
  std::optional<std::string> mock_corpus;
  std::optional<std::string> generation_url;
  std::optional<std::string> nli_url;
  std::optional<std::string> cache_dir;
  std::optional<size_t> nli_batch_size;
};

void AddCommon(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON config file");
  app->add_option("--seed", f.seed, "Root seed for every random stage");
  app->add_option("--workers", f.workers, "Worker threads");
  app->add_option("--mock-corpus", f.mock_corpus, "JSONL corpus for the mock generator");
  app->add_option("--generation-url", f.generation_url, "Generation endpoint base URL");
  app->add_option("--nli-url", f.nli_url, "NLI endpoint base URL");
  app->add_option("--cache-dir", f.cache_dir, "Enable the response cache in this directory");
  app->add_option("--nli-batch-size", f.nli_batch_size, "Pairs per NLI request (1..64)");
}

template <typename T>
void Set(T& slot, const std::optional<T>& v) {
  if (v) slot = *v;
}

RunConfig Resolve(const CommonFlags& f) {
  RunConfig c = LoadConfig(f.config, ProcessEnv());
  Set(c.seed, f.seed);
  Set(c.workers, f.workers);
  Set(c.generation.mock_corpus, f.mock_corpus);
  Set(c.generation.base_url, f.generation_url);
  Set(c.nli.base_url, f.nli_url);
  Set(c.nli.batch_size, f.nli_batch_size);
  if (f.cache_dir) {
    c.cache.dir = *f.cache_dir;
    c.cache.enabled = true;
  }
  return c;
}

void Emit(const std::optional<std::string>& out, const std::string& content) {
  if (out) {
    WriteFileAtomic(*out, content);
  } else {
    std::cout << content;
  }
}

int ReportError(std::string_view stage, const Error& e) {
  const Json j = {{"error",
                   {{"stage", stage}, {"kind", ErrorKindName(e.kind())}, {"message", e.what()}}}};
  std::cerr << j.dump() << "\n";
  return e.kind() == ErrorKind::kConfig ? kExitConfig : kExitRuntime;
}

std::string PromptFrom(const RunConfig& c, const std::optional<std::string>& question,
                       const std::optional<std::string>& prompt) {
  if (question.has_value() == prompt.has_value()) {
    throw Error(ErrorKind::kConfig, "give exactly one of --question or --prompt");
  }
  return prompt ? *prompt : c.RenderPrompt(*question);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concept-level uncertainty for sampled language model outputs"};
  app.require_subcommand(1);

  CommonFlags common;
  std::optional<std::string> question, prompt, out, samples_path, pool_path, matrix_path;
  std::optional<std::string> dataset, kind, run_path, run_out, pairs, csv, method;
  std::optional<std::string> hierarchy_path, corpus_path, prompts_path;
  std::optional<int> n;
  std::optional<double> temperature, threshold, epsilon, theta_h, theta_l;
  bool table = false;

  auto* run = app.add_subcommand("run", "Sample, extract, score and rank concepts");
  AddCommon(run, common);
  run->add_option("--question", question, "Question rendered into the prompt template");
  run->add_option("--prompt", prompt, "Raw prompt, used verbatim");
  run->add_option("--out", out, "Artifact directory")->required();
  run->add_option("--n", n, "Number of sampled outputs");
  run->add_option("--temperature", temperature, "Sampling temperature");
  run->add_option("--threshold", threshold, "Consolidation threshold");
  run->add_option("--epsilon", epsilon, "Score clamp before the log");
  run->add_option("--theta-h", theta_h, "Entailed threshold");
  run->add_option("--theta-l", theta_l, "Hallucinated threshold");

  auto* sample = app.add_subcommand("sample", "Generate N outputs for a prompt");
  AddCommon(sample, common);
  sample->add_option("--question", question, "Question rendered into the prompt template");
  sample->add_option("--prompt", prompt, "Raw prompt, used verbatim");
  sample->add_option("--n", n, "Number of sampled outputs");
  sample->add_option("--temperature", temperature, "Sampling temperature");
  sample->add_option("--out", out, "samples.jsonl to write (default stdout)");

  auto* extract = app.add_subcommand("extract", "Extract and consolidate concepts");
  AddCommon(extract, common);
  extract->add_option("--samples", samples_path, "samples.jsonl")->required();
  extract->add_option("--threshold", threshold, "Consolidation threshold");
  extract->add_option("--out", out, "pool.jsonl to write (default stdout)");

  auto* score = app.add_subcommand("score", "Score every sample against every concept");
  AddCommon(score, common);
  score->add_option("--samples", samples_path, "samples.jsonl")->required();
  score->add_option("--pool", pool_path, "pool.jsonl")->required();
  score->add_option("--out", out, "matrix.json to write (default stdout)");

  auto* unc = app.add_subcommand("uncertainty", "Per-concept uncertainty from a matrix");
  AddCommon(unc, common);
  unc->add_option("--matrix", matrix_path, "matrix.json")->required();
  unc->add_option("--epsilon", epsilon, "Score clamp before the log");
  unc->add_option("--out", out, "uncertainty.json to write (default stdout)");
  unc->add_flag("--table", table, "Print a ranked table instead of JSON");

  auto* detect = app.add_subcommand("detect", "Hallucination detection on a QA dataset");
  AddCommon(detect, common);
  detect->add_option("--dataset", dataset, "Dataset JSONL")->required();
  detect->add_option("--kind", kind, "eli5, wikiqa or qnli")
      ->required()
      ->check(CLI::IsMember({"eli5", "wikiqa", "qnli"}));
  detect->add_option("--theta-h", theta_h, "Entailed threshold");
  detect->add_option("--theta-l", theta_l, "Hallucinated threshold");
  detect->add_option("--out", out, "Metrics JSON to write (default stdout)");
  detect->add_option("--run-out", run_out, "Per-instance run JSON to write");

  auto* sweep = app.add_subcommand("sweep", "Detection metrics over threshold pairs");
  AddCommon(sweep, common);
  sweep->add_option("--pairs", pairs, "Pairs as high:low,high:low")->required();
  sweep->add_option("--run", run_path, "Run JSON written by detect --run-out");
  sweep->add_option("--dataset", dataset, "Dataset JSONL (when no --run)");
  sweep->add_option("--kind", kind, "eli5, wikiqa or qnli")
      ->check(CLI::IsMember({"eli5", "wikiqa", "qnli"}));
  sweep->add_option("--method", method, "uncertainty or question_baseline")
      ->check(CLI::IsMember({"uncertainty", "question_baseline"}));
  sweep->add_option("--out", out, "Sweep JSON to write (default stdout)");
  sweep->add_option("--csv", csv, "Curve CSV to write");

  auto* div = app.add_subcommand("diversity", "Conceptual diversity of a story set");
  AddCommon(div, common);
  div->add_option("--hierarchy", hierarchy_path, "Hierarchy JSON")->required();
  div->add_option("--corpus", corpus_path, "Pre-generated story JSONL");
  div->add_option("--prompts", prompts_path, "One prompt per line");
  div->add_option("--n", n, "Stories per prompt");
  div->add_option("--epsilon", epsilon, "Score clamp before the log");
  div->add_option("--out", out, "Report JSON to write (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    RunConfig c = Resolve(common);
    Set(c.generation.n, n);
    Set(c.generation.temperature, temperature);
    Set(c.consolidation_threshold, threshold);
    Set(c.epsilon, epsilon);
    Set(c.theta_h, theta_h);
    Set(c.theta_l, theta_l);
    c.Validate();
    const Backends b = MakeBackends(c);

    if (stage == "run") {
      const std::string p = PromptFrom(c, question, prompt);
      const RunArtifacts a = RunPipeline(p, c, b);
      WriteArtifactDir(*out, ArtifactFiles(a, c));
      std::cout << RenderUncertaintyTable(a.report);
    } else if (stage == "sample") {
      const auto s = SampleStage(PromptFrom(c, question, prompt), c, *b.generator);
      Emit(out, SerializeSamples(s));
    } else if (stage == "extract") {
      const auto s = ParseSamples(ReadFile(*samples_path));
      Emit(out, SerializePool(ExtractStage(s, c, b)));
    } else if (stage == "score") {
      const auto s = ParseSamples(ReadFile(*samples_path));
      const ConceptPool pool = ParsePool(ReadFile(*pool_path));
      Emit(out, SerializeMatrix(ScoreStage(s, pool, c, *b.scorer)));
    } else if (stage == "uncertainty") {
      const ScoreMatrix m = ParseMatrix(ReadFile(*matrix_path));
      const UncertaintyReport r = UncertaintyStage(m, c);
      Emit(out, table ? RenderUncertaintyTable(r) : SerializeUncertaintyReport(r));
    } else if (stage == "detect") {
      const auto raw = ParseRawDataset(ReadFile(*dataset));
      const DatasetRun r = RunDataset(raw, DatasetKindFromName(*kind), c, b);
      if (run_out) WriteFileAtomic(*run_out, SerializeDatasetRun(r));
      const Json report = DetectionReport(r, {c.theta_h, c.theta_l});
      Emit(out, report.dump(1) + "\n");
      std::cerr << RenderCorrelationTable(RunCorrelationStudy(r.instances), *kind);
    } else if (stage == "sweep") {
      const auto list = ParseThresholdPairs(*pairs);
      DatasetRun r;
      if (run_path) {
        r = ParseDatasetRun(ReadFile(*run_path));
      } else if (dataset && kind) {
        r = RunDataset(ParseRawDataset(ReadFile(*dataset)), DatasetKindFromName(*kind), c, b);
      } else {
        throw Error(ErrorKind::kConfig, "sweep needs --run or --dataset with --kind");
      }
      const auto rows = ThresholdSweep(
          r.instances, list,
          DetectionMethodFromName(method.value_or("uncertainty")));
      Emit(out, ToJson(rows).dump(1) + "\n");
      if (csv) WriteFileAtomic(*csv, SweepCurvesCsv(rows));
    } else if (stage == "diversity") {
      const ConceptHierarchy h = ParseHierarchy(ReadFile(*hierarchy_path));
      std::vector<CorpusStory> corpus;
      std::vector<OutputSample> stories;
      if (corpus_path && !prompts_path) {
        corpus = ParseStoryCorpus(ReadFile(*corpus_path));
        stories = CorpusSamples(corpus);
      } else if (prompts_path && !corpus_path) {
        const auto lines = SplitLines(ReadFile(*prompts_path));
        for (const auto& line : lines) {
          if (Trim(line).empty()) continue;
          for (auto& s : SampleStage(Trim(line), c, *b.generator, "sample:" + Trim(line))) {
            s.index = static_cast<int>(stories.size());
            corpus.push_back({s.text, std::nullopt});
            stories.push_back(std::move(s));
          }
        }
      } else {
        throw Error(ErrorKind::kConfig, "give exactly one of --corpus or --prompts");
      }
      const DiversityReport r = RunStage("diversity", [&] {
        return RunDiversity(stories, corpus, h, *b.scorer, {c.workers, c.nli.batch_size},
                            c.epsilon);
      });
      if (!r.warning.empty()) std::cerr << "warning: " << r.warning << "\n";
      Emit(out, SerializeDiversityReport(r));
    }
  } catch (const StageError& e) {
    return ReportError(e.stage(), e);
  } catch (const Error& e) {
    return ReportError(stage, e);
  } catch (const std::exception& e) {
    return ReportError(stage, Error(ErrorKind::kIo, e.what()));
  }
  return kExitOk;
}
