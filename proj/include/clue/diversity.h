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

#ifndef CLUE_DIVERSITY_H_
#define CLUE_DIVERSITY_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clue/backends.h"
#include "clue/scoring.h"
#include "clue/uncertainty.h"

namespace clue {

// JSON {"upper": str, "lower": [str]}; at least two distinct lower concepts.
struct ConceptHierarchy {
  std::string upper;
  std::vector<std::string> lower;

  void Validate() const;
  // Lower concepts as a pool with ids "l0", "l1", ...
  ConceptPool AsPool() const;
};

ConceptHierarchy ParseHierarchy(std::string_view json);
std::string SerializeHierarchy(const ConceptHierarchy& h);

struct ClassCounts {
  std::vector<std::string> ids;  // column ids
  std::vector<size_t> counts;    // aligned with ids
  size_t total = 0;
};

// Each row goes to its highest-scoring column; ties go to the lowest column.
ClassCounts Classify(const ScoreMatrix& matrix);
// Also checks that the columns are exactly the hierarchy's lower concepts.
ClassCounts Classify(const ScoreMatrix& matrix, const ConceptHierarchy& h);

// M / sum(1 / U_j). Any U_j == 0 yields 0 and sets `warning`.
double HarmonicMeanDiversity(std::span<const double> uncertainties,
                             std::string* warning = nullptr);

// -sum (n_j / N) ln(n_j / N), with empty classes contributing 0.
double EntropyDiversity(const ClassCounts& counts);

struct CorpusStory {
  std::string text;
  std::optional<std::string> intended_class;
};

// JSONL {"text": str, "intended_class": str|null}.
std::vector<CorpusStory> ParseStoryCorpus(std::string_view jsonl);

// The corpus as one sample batch, indices in file order.
std::vector<OutputSample> CorpusSamples(std::span<const CorpusStory> corpus);

struct DiversityReport {
  ConceptHierarchy hierarchy;
  UncertaintyReport uncertainty;
  ClassCounts counts;
  double harmonic = 0.0;
  double entropy = 0.0;
  std::string warning;
  // intended class -> counts per lower concept, for reporting only.
  std::vector<std::pair<std::string, std::vector<size_t>>> confusion;
};

DiversityReport RunDiversity(std::span<const OutputSample> samples,
                             std::span<const CorpusStory> corpus,
                             const ConceptHierarchy& h, NliScorer& scorer,
                             const ScoringOptions& options = {},
                             double epsilon = kDefaultEpsilon);

std::string SerializeDiversityReport(const DiversityReport& r);

}  // namespace clue

#endif  // CLUE_DIVERSITY_H_
