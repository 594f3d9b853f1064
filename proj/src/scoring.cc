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

#include "clue/scoring.h"

#include "clue/error.h"
#include "clue/util.h"

namespace clue {

namespace {

template <typename RowText>
std::vector<std::vector<double>> ScoreGrid(size_t rows, const ConceptPool& pool,
                                           RowText row_text,
                                           std::string (*hypothesis)(std::string_view),
                                           NliScorer& scorer,
                                           const ScoringOptions& options,
                                           const std::vector<std::string>& row_names) {
  const size_t cols = pool.concepts.size();
  std::vector<NliPair> pairs;
  pairs.reserve(rows * cols);
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) {
      pairs.push_back({std::string(row_text(i)), hypothesis(pool.concepts[j].text)});
    }
  }
  const auto logits = ScorePairs(
      scorer, pairs, options.workers, options.nli_batch_size, [&](size_t k) {
        return row_names[k / cols] + ", concept " + pool.concepts[k % cols].id;
      });
  std::vector<std::vector<double>> values(rows, std::vector<double>(cols));
  for (size_t k = 0; k < logits.size(); ++k) {
    values[k / cols][k % cols] = EntailmentProbability(logits[k]);
  }
  return values;
}

}  // namespace

std::string ConceptHypothesis(std::string_view concept_text) {
  return "This example is about " + std::string(concept_text);
}

std::string QuestionHypothesis(std::string_view concept_text) {
  return "This question is relevant to " + std::string(concept_text);
}

double ConceptScore(std::string_view sequence, std::string_view concept_text,
                    NliScorer& scorer) {
  return EntailmentProbability(scorer.Score(sequence, ConceptHypothesis(concept_text)));
}

double QuestionRelevanceScore(std::string_view question,
                              std::string_view concept_text, NliScorer& scorer) {
  return EntailmentProbability(
      scorer.Score(question, QuestionHypothesis(concept_text)));
}

std::vector<double> ScoreMatrix::Column(size_t j) const {
  std::vector<double> col;
  col.reserve(values.size());
  for (const auto& row : values) col.push_back(row.at(j));
  return col;
}

void ScoreMatrix::Validate() const {
  if (values.size() != rows.size()) {
    throw Error(ErrorKind::kInvalidInput, "matrix row count mismatch");
  }
  if (!col_texts.empty() && col_texts.size() != cols.size()) {
    throw Error(ErrorKind::kInvalidInput, "matrix column text count mismatch");
  }
  for (const auto& row : values) {
    if (row.size() != cols.size()) {
      throw Error(ErrorKind::kInvalidInput, "matrix column count mismatch");
    }
    for (double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorKind::kInvalidInput, "matrix value outside [0, 1]");
      }
    }
  }
}

std::string SerializeMatrix(const ScoreMatrix& m) {
  const Json j = {{"rows", m.rows},
                  {"cols", m.cols},
                  {"col_texts", m.col_texts},
                  {"values", m.values},
                  {"template_id", m.template_id},
                  {"backend_id", m.backend_id},
                  {"provenance",
                   {{"samples_hash", m.provenance.samples_hash},
                    {"pool_hash", m.provenance.pool_hash}}}};
  return j.dump(1) + "\n";
}

ScoreMatrix ParseMatrix(std::string_view json) {
  ScoreMatrix m;
  try {
    const Json j = Json::parse(json);
    m.rows = j.at("rows").get<std::vector<int>>();
    m.cols = j.at("cols").get<std::vector<std::string>>();
    m.col_texts = j.value("col_texts", std::vector<std::string>{});
    m.values = j.at("values").get<std::vector<std::vector<double>>>();
    m.template_id = j.value("template_id", std::string(kExampleAboutTemplateId));
    m.backend_id = j.value("backend_id", std::string());
    if (j.contains("provenance")) {
      m.provenance.samples_hash = j["provenance"].value("samples_hash", "");
      m.provenance.pool_hash = j["provenance"].value("pool_hash", "");
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("matrix file: ") + e.what());
  }
  m.Validate();
  return m;
}

ScoreMatrix ComputeScoreMatrix(std::span<const OutputSample> samples,
                               const ConceptPool& pool, NliScorer& scorer,
                               const ScoringOptions& options) {
  if (samples.empty() || pool.concepts.empty()) {
    throw Error(ErrorKind::kInvalidInput, "score matrix needs samples and concepts");
  }
  std::vector<std::string> row_names;
  for (const auto& s : samples) row_names.push_back("sample " + std::to_string(s.index));
  ScoreMatrix m;
  m.values = ScoreGrid(
      samples.size(), pool, [&](size_t i) -> const std::string& { return samples[i].text; },
      &ConceptHypothesis, scorer, options, row_names);
  for (const auto& s : samples) m.rows.push_back(s.index);
  for (const auto& c : pool.concepts) {
    m.cols.push_back(c.id);
    m.col_texts.push_back(c.text);
  }
  m.backend_id = scorer.id();
  m.provenance.samples_hash = Sha256Hex(SerializeSamples(samples));
  m.provenance.pool_hash = Sha256Hex(SerializePool(pool));
  return m;
}

std::string_view AnswerRoleName(AnswerRole role) {
  switch (role) {
    case AnswerRole::kRelevant: return "relevant";
    case AnswerRole::kLessRelevant: return "less_relevant";
    case AnswerRole::kIrrelevant: return "irrelevant";
  }
  return "relevant";
}

AnswerRole AnswerRoleFromName(std::string_view name) {
  if (name == "relevant") return AnswerRole::kRelevant;
  if (name == "less_relevant") return AnswerRole::kLessRelevant;
  if (name == "irrelevant") return AnswerRole::kIrrelevant;
  throw Error(ErrorKind::kSchema, "unknown answer role " + std::string(name));
}

AnswerScores ComputeAnswerScores(std::string_view answer, const ConceptPool& pool,
                                 NliScorer& scorer, AnswerRole role,
                                 const ScoringOptions& options) {
  if (answer.empty()) throw Error(ErrorKind::kInvalidInput, "answer text is empty");
  AnswerScores out;
  out.role = role;
  for (const auto& c : pool.concepts) out.concept_ids.push_back(c.id);
  if (pool.concepts.empty()) return out;
  const std::string name = std::string(AnswerRoleName(role)) + " answer";
  out.scores = ScoreGrid(
      1, pool, [&](size_t) { return answer; }, &ConceptHypothesis, scorer,
      options, {name})[0];
  return out;
}

std::vector<double> ComputeQuestionRelevance(std::string_view question,
                                             const ConceptPool& pool,
                                             NliScorer& scorer,
                                             const ScoringOptions& options) {
  if (question.empty()) throw Error(ErrorKind::kInvalidInput, "question is empty");
  if (pool.concepts.empty()) return {};
  return ScoreGrid(
      1, pool, [&](size_t) { return question; }, &QuestionHypothesis, scorer,
      options, {"question"})[0];
}

}  // namespace clue
