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

#ifndef CLUE_SCORING_H_
#define CLUE_SCORING_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clue/backends.h"
#include "clue/extraction.h"

namespace clue {

inline constexpr std::string_view kExampleAboutTemplateId = "example_about";
inline constexpr std::string_view kQuestionRelevantTemplateId = "question_relevant";

// "This example is about {concept}".
std::string ConceptHypothesis(std::string_view concept_text);
// "This question is relevant to {concept}".
std::string QuestionHypothesis(std::string_view concept_text);

// Entailment probability that `sequence` is about `concept_text`.
double ConceptScore(std::string_view sequence, std::string_view concept_text,
                    NliScorer& scorer);

// Entailment probability with the question as premise; the baseline
// detector's relevance score.
double QuestionRelevanceScore(std::string_view question,
                              std::string_view concept_text, NliScorer& scorer);

struct MatrixProvenance {
  std::string samples_hash;  // SHA-256 of the serialized samples
  std::string pool_hash;     // SHA-256 of the serialized pool

  bool operator==(const MatrixProvenance&) const = default;
};

// values[i][j] = f(o_i, c_j), all in [0, 1].
struct ScoreMatrix {
  std::vector<int> rows;                   // sample indices
  std::vector<std::string> cols;           // concept ids
  std::vector<std::string> col_texts;      // concept texts, aligned with cols
  std::vector<std::vector<double>> values;
  std::string template_id{kExampleAboutTemplateId};
  std::string backend_id;
  MatrixProvenance provenance;

  size_t num_rows() const { return rows.size(); }
  size_t num_cols() const { return cols.size(); }
  std::vector<double> Column(size_t j) const;

  // Throws kInvalidInput when shapes disagree or a value leaves [0, 1].
  void Validate() const;
};

std::string SerializeMatrix(const ScoreMatrix& matrix);
ScoreMatrix ParseMatrix(std::string_view json);

struct ScoringOptions {
  size_t workers = 1;
  size_t nli_batch_size = 1;
};

// Complete matrix or an error naming the failing (sample, concept) cell.
ScoreMatrix ComputeScoreMatrix(std::span<const OutputSample> samples,
                               const ConceptPool& pool, NliScorer& scorer,
                               const ScoringOptions& options = {});

enum class AnswerRole { kRelevant, kLessRelevant, kIrrelevant };

std::string_view AnswerRoleName(AnswerRole role);
AnswerRole AnswerRoleFromName(std::string_view name);

// S^a_j for every pool concept, aligned with pool.concepts.
struct AnswerScores {
  AnswerRole role = AnswerRole::kRelevant;
  std::vector<std::string> concept_ids;
  std::vector<double> scores;
};

AnswerScores ComputeAnswerScores(std::string_view answer, const ConceptPool& pool,
                                 NliScorer& scorer, AnswerRole role,
                                 const ScoringOptions& options = {});

// Question-premise relevance for every pool concept, aligned with the pool.
std::vector<double> ComputeQuestionRelevance(std::string_view question,
                                             const ConceptPool& pool,
                                             NliScorer& scorer,
                                             const ScoringOptions& options = {});

}  // namespace clue

#endif  // CLUE_SCORING_H_
