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

#ifndef CLUE_UNCERTAINTY_H_
#define CLUE_UNCERTAINTY_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clue/scoring.h"

namespace clue {

// Scores are clamped to at least this before taking logs, bounding U by
// -ln(epsilon) ~= 27.631.
inline constexpr double kDefaultEpsilon = 1e-12;

// U = -(1/N) * sum_i ln(max(s_i, epsilon)), in nats. Throws kInvalidInput
// for an empty list or epsilon outside (0, 1e-3].
double ConceptUncertainty(std::span<const double> scores,
                          double epsilon = kDefaultEpsilon);

struct ConceptUncertaintyEntry {
  std::string id;
  std::string text;
  double uncertainty = 0.0;
};

struct UncertaintyProvenance {
  std::string samples_hash;
  std::string pool_hash;
  std::string matrix_hash;
};

struct UncertaintyReport {
  // Pool (column) order.
  std::vector<ConceptUncertaintyEntry> entries;
  size_t num_samples = 0;
  double epsilon = kDefaultEpsilon;
  UncertaintyProvenance provenance;

  // Descending by uncertainty, ties broken by id.
  std::vector<ConceptUncertaintyEntry> Ranked() const;
  std::vector<double> Values() const;
};

UncertaintyReport ComputeUncertaintyReport(const ScoreMatrix& matrix,
                                           double epsilon = kDefaultEpsilon);

// Checks that the report (or matrix) covers exactly the pool's concepts.
void CheckAgainstPool(const UncertaintyReport& report, const ConceptPool& pool);

// Ranked entries, plus N, epsilon and provenance.
std::string SerializeUncertaintyReport(const UncertaintyReport& report);
UncertaintyReport ParseUncertaintyReport(std::string_view json);

// Plain-text table of ranked concepts with uncertainties to three decimals.
std::string RenderUncertaintyTable(const UncertaintyReport& report);

}  // namespace clue

#endif  // CLUE_UNCERTAINTY_H_
