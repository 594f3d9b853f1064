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

#ifndef CLUE_PIPELINE_H_
#define CLUE_PIPELINE_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clue/config.h"
#include "clue/diversity.h"
#include "clue/error.h"
#include "clue/extraction.h"
#include "clue/halludetect.h"
#include "clue/scoring.h"
#include "clue/uncertainty.h"

namespace clue {

// An Error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), cause.what()), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Runs fn, rethrowing any clue::Error as a StageError for `stage`.
template <typename Fn>
auto RunStage(std::string_view stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(std::string(stage), e);
  }
}

std::vector<OutputSample> SampleStage(std::string_view prompt, const RunConfig& c,
                                      Generator& generator,
                                      std::string_view seed_stage = "sample");
ConceptPool ExtractStage(std::span<const OutputSample> samples, const RunConfig& c,
                         const Backends& b, std::string_view seed_stage = "consolidate");
ScoreMatrix ScoreStage(std::span<const OutputSample> samples, const ConceptPool& pool,
                       const RunConfig& c, NliScorer& scorer);
UncertaintyReport UncertaintyStage(const ScoreMatrix& matrix, const RunConfig& c);

struct RunArtifacts {
  std::vector<OutputSample> samples;
  ConceptPool pool;
  ScoreMatrix matrix;
  UncertaintyReport report;
};

RunArtifacts RunPipeline(std::string_view prompt, const RunConfig& c, const Backends& b);

// samples.jsonl, pool.jsonl, matrix.json, uncertainty.json and config.json,
// in that order.
std::vector<std::pair<std::string, std::string>> ArtifactFiles(const RunArtifacts& a,
                                                               const RunConfig& c);

// {"layout_version": 1, "artifacts": [{"name", "sha256", "bytes"}]}.
std::string ManifestJson(std::span<const std::pair<std::string, std::string>> files);

// Writes the files plus manifest.json to a sibling temporary directory and
// renames it into place, replacing any previous directory at `dir`.
void WriteArtifactDir(const std::filesystem::path& dir,
                      std::span<const std::pair<std::string, std::string>> files);

InstanceResult RunInstance(const QAInstance& inst, const RunConfig& c, const Backends& b,
                           size_t inner_workers);

// BuildSubsets with a seed split from the root, then one pipeline run per
// instance. Results are in input order regardless of scheduling.
DatasetRun RunDataset(std::span<const RawInstance> raw, DatasetKind kind,
                      const RunConfig& c, const Backends& b);

// Metrics, correlations and configuration for one dataset run.
Json DetectionReport(const DatasetRun& run, const Thresholds& t);

}  // namespace clue

#endif  // CLUE_PIPELINE_H_
