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

#ifndef CLUE_HALLUDETECT_H_
#define CLUE_HALLUDETECT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clue/metrics.h"
#include "clue/scoring.h"

namespace clue {

enum class DatasetKind { kEli5, kWikiQa, kQnli };

std::string_view DatasetKindName(DatasetKind kind);
// Accepts "eli5", "wikiqa" and "qnli"; throws kInvalidInput otherwise.
DatasetKind DatasetKindFromName(std::string_view name);

// Ingestion record:
//   {"id": str, "question": str,
//    "answers": [{"text": str, "score": float|null, "label": str|null}]}
struct RawAnswer {
  std::string text;
  std::optional<double> score;
  std::optional<std::string> label;
};

struct RawInstance {
  std::string id;
  std::string question;
  std::vector<RawAnswer> answers;
};

// Throws kSchema naming the offending line.
std::vector<RawInstance> ParseRawDataset(std::string_view jsonl);

struct QAAnswer {
  std::string text;
  AnswerRole role = AnswerRole::kRelevant;
  std::string source_id;  // instance the text was taken from
};

struct QAInstance {
  std::string id;
  std::string question;
  std::vector<QAAnswer> answers;  // at most one per role
  std::string source_dataset;

  const QAAnswer* Find(AnswerRole role) const;
};

struct SubsetBuild {
  std::vector<QAInstance> instances;
  size_t skipped = 0;
};

// Selects the relevant and less relevant answers per dataset kind:
//   eli5   highest and lowest scored answers (first occurrence on ties);
//   wikiqa one correct and one incorrect answer, drawn at random;
//   qnli   an "entailment" sentence as relevant and a "not_entailment" one
//          as less relevant. An instance carrying only one label yields
//          only that role.
// The irrelevant answer is drawn uniformly from all answers of the other
// instances. Instances that cannot fill their roles are skipped and counted.
SubsetBuild BuildSubsets(std::span<const RawInstance> raw, DatasetKind kind,
                         uint64_t rng_seed);

inline constexpr double kDefaultThetaHigh = 0.9;
inline constexpr double kDefaultThetaLow = 0.1;

struct Thresholds {
  double high = kDefaultThetaHigh;
  double low = kDefaultThetaLow;

  // Requires 0 <= low < high <= 1.
  void Validate() const;
  bool operator==(const Thresholds&) const = default;
};

inline constexpr int kEntailed = 0;
inline constexpr int kHallucinated = 1;
inline constexpr int kExcluded = -1;

// 0 if score > high, 1 if score < low, -1 otherwise.
int LabelForScore(double answer_score, const Thresholds& t);

struct LabeledConcept {
  std::string id;
  double answer_score = 0.0;
  int label = kExcluded;
  double uncertainty = 0.0;
};

// Labels are derived from the relevant answer only; any other role is
// rejected.
std::vector<LabeledConcept> LabelConcepts(const AnswerScores& relevant,
                                          std::span<const double> uncertainty,
                                          const Thresholds& t);

// Everything the correlation study and detection evaluation need from one
// instance's pipeline run.
struct InstanceResult {
  std::string id;
  std::string question;
  std::vector<std::string> concept_ids;
  std::vector<std::string> concept_texts;
  std::vector<double> uncertainty;
  std::map<AnswerRole, std::vector<double>> answer_scores;
  std::vector<double> question_relevance;
};

struct DatasetRun {
  std::string dataset_kind;
  uint64_t seed = 0;
  size_t skipped_instances = 0;
  std::vector<InstanceResult> instances;
};

std::string SerializeDatasetRun(const DatasetRun& run);
DatasetRun ParseDatasetRun(std::string_view json);

struct RoleCorrelation {
  AnswerRole role = AnswerRole::kRelevant;
  std::optional<double> mean;
  size_t valid = 0;
  size_t excluded = 0;  // undefined correlation (zero variance, < 2 concepts)
  std::vector<std::pair<std::string, double>> per_instance;
};

struct CorrelationStudy {
  std::vector<RoleCorrelation> roles;  // relevant, less_relevant, irrelevant

  const RoleCorrelation& For(AnswerRole role) const;
};

CorrelationStudy RunCorrelationStudy(std::span<const InstanceResult> results);
Json ToJson(const CorrelationStudy& study);
std::string RenderCorrelationTable(const CorrelationStudy& study,
                                   std::string_view dataset_name);

enum class DetectionMethod { kUncertainty, kQuestionBaseline };

std::string_view DetectionMethodName(DetectionMethod method);
DetectionMethod DetectionMethodFromName(std::string_view name);

struct InstanceMetrics {
  std::string id;
  double auroc = 0.0;
  double auprc = 0.0;
  size_t positives = 0;
  size_t negatives = 0;
};

struct DetectionMetrics {
  DetectionMethod method = DetectionMethod::kUncertainty;
  Thresholds thresholds;
  double macro_auroc = 0.0;
  double macro_auprc = 0.0;
  double micro_auroc = 0.0;
  double micro_auprc = 0.0;
  std::vector<InstanceMetrics> per_instance;
  size_t labeled_concepts = 0;
  size_t excluded_concepts = 0;
  size_t skipped_instances = 0;  // no relevant answer or a single class
  // Pooled micro-level inputs, kept for curve output.
  std::vector<int> pooled_labels;
  std::vector<double> pooled_scores;
};

// Hallucination score per concept: U for kUncertainty and 1 - question
// relevance for kQuestionBaseline, so larger always means more likely
// hallucinated. Macro values average instances with both classes; micro
// values pool every labeled concept. Throws kEvaluationEmpty when no
// instance has both classes.
DetectionMetrics EvaluateDetection(std::span<const InstanceResult> results,
                                   const Thresholds& t, DetectionMethod method);

Json ToJson(const DetectionMetrics& m);

struct SweepRow {
  Thresholds thresholds;
  std::optional<DetectionMetrics> metrics;
  std::string error;  // set when the pair left nothing to evaluate
  std::vector<CurvePoint> roc;
  std::vector<CurvePoint> pr;
};

std::vector<SweepRow> ThresholdSweep(std::span<const InstanceResult> results,
                                     std::span<const Thresholds> pairs,
                                     DetectionMethod method);

Json ToJson(std::span<const SweepRow> rows);
// theta_h,theta_l,curve,x,y with curve in {roc, pr}; micro-pooled points.
std::string SweepCurvesCsv(std::span<const SweepRow> rows);

// "0.9:0.1,0.7:0.3" -> pairs; throws kInvalidInput on malformed input.
std::vector<Thresholds> ParseThresholdPairs(std::string_view text);

}  // namespace clue

#endif  // CLUE_HALLUDETECT_H_
