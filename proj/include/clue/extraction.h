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

#ifndef CLUE_EXTRACTION_H_
#define CLUE_EXTRACTION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clue/backends.h"
#include "clue/mock_backends.h"

namespace clue {

inline constexpr double kDefaultConsolidationThreshold = 0.99;
inline constexpr size_t kMaxConceptLength = 200;

struct Concept {
  std::string id;
  std::string text;
  std::vector<int> sources;               // sorted, unique sample indices
  std::vector<std::string> merged_from;   // texts folded into this concept

  bool operator==(const Concept&) const = default;
};

struct ConceptPool {
  std::vector<Concept> concepts;
  std::string origin_request_hash;
  double threshold = kDefaultConsolidationThreshold;
  uint64_t rng_seed = 0;
};

// JSONL: a header line {"origin_request_hash","rng_seed","threshold"} and
// then one {"id","text","sources","merged_from"} line per concept.
std::string SerializePool(const ConceptPool& pool);
ConceptPool ParsePool(std::string_view jsonl);

// The one-shot basketball prompt with `sequence` in the target slot. The
// result ends with "concepts:".
std::string RenderExtractionPrompt(std::string_view sequence);

// Inverse of RenderExtractionPrompt: the target paragraph, or nullopt when
// `prompt` is not an extraction prompt.
std::optional<std::string> ExtractionTarget(std::string_view prompt);

// Parses a completion such as "'A', 'B and C'" (single-, double- or
// un-quoted, optionally led by "concepts:" and wrapped in one pair of
// double quotes). Items are trimmed, unquoted, exact duplicates dropped and
// items longer than kMaxConceptLength discarded. Throws kExtractionParse
// carrying the raw text when nothing usable remains.
std::vector<std::string> ParseConcepts(std::string_view raw);

// "'A', 'B'": the list format used in the one-shot example.
std::string FormatConceptList(std::span<const std::string> concepts);

// Offline stand-in for an extraction model: one short phrase per clause.
std::vector<std::string> DeriveMockConcepts(std::string_view paragraph);

// Answers extraction prompts with the corpus entry's stored concepts, or
// DeriveMockConcepts when the paragraph is unknown or has none.
MockGenerator::Responder MakeExtractionResponder(MockCorpus corpus);

// "This concept is similar to {concept}".
std::string SimilarityHypothesis(std::string_view concept_text);

// Directed similarity probabilities: probs[i][j] is the entailment
// probability with concept i as premise and SimilarityHypothesis(concept j)
// as hypothesis. The diagonal is left at 1.
using SimilarityMatrix = std::vector<std::vector<double>>;

SimilarityMatrix ScoreSimilarity(std::span<const Concept> concepts,
                                 NliScorer& scorer, size_t workers = 1,
                                 size_t batch_size = 1);

// Groups concepts whose probabilities in both directions exceed `threshold`,
// closing the relation transitively, and keeps one representative per group
// drawn uniformly with a generator seeded by `rng_seed`. Groups are emitted
// in order of their earliest member. The representative inherits the union
// of the group's sources and every discarded text in merged_from.
std::vector<Concept> ConsolidateWithScores(std::span<const Concept> concepts,
                                           const SimilarityMatrix& probs,
                                           double threshold, uint64_t rng_seed);

std::vector<Concept> Consolidate(std::span<const Concept> concepts,
                                 NliScorer& scorer, double threshold,
                                 uint64_t rng_seed, size_t workers = 1,
                                 size_t batch_size = 1);

struct ExtractionOptions {
  double threshold = kDefaultConsolidationThreshold;
  uint64_t rng_seed = 0;
  int max_tokens = kDefaultMaxTokens;
  size_t workers = 1;
  size_t nli_batch_size = 1;
};

// Extracts concepts from every sample at temperature 0, unions them by exact
// text in order of first appearance (ids "c0", "c1", ...) and consolidates.
ConceptPool ExtractConcepts(std::span<const OutputSample> samples,
                            Generator& generator, NliScorer& scorer,
                            const ExtractionOptions& options);

// Exact-text union of per-sample concept lists; list k belongs to sample k.
std::vector<Concept> UnionConcepts(
    std::span<const std::vector<std::string>> per_sample);

}  // namespace clue

#endif  // CLUE_EXTRACTION_H_
