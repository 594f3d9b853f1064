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

#include "clue/diversity.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "clue/error.h"
#include "clue/util.h"

namespace clue {

void ConceptHierarchy::Validate() const {
  if (lower.size() < 2) {
    throw Error(ErrorKind::kInvalidInput, "hierarchy needs at least two lower concepts");
  }
  std::set<std::string> seen;
  for (const auto& c : lower) {
    if (Trim(c).empty()) throw Error(ErrorKind::kInvalidInput, "empty lower concept");
    if (!seen.insert(c).second) {
      throw Error(ErrorKind::kInvalidInput, "duplicate lower concept '" + c + "'");
    }
  }
}

ConceptPool ConceptHierarchy::AsPool() const {
  ConceptPool pool;
  for (size_t j = 0; j < lower.size(); ++j) {
    pool.concepts.push_back({"l" + std::to_string(j), lower[j], {}, {}});
  }
  return pool;
}

ConceptHierarchy ParseHierarchy(std::string_view json) {
  ConceptHierarchy h;
  try {
    const Json j = Json::parse(json);
    h.upper = j.at("upper").get<std::string>();
    h.lower = j.at("lower").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("hierarchy: ") + e.what());
  }
  h.Validate();
  return h;
}

std::string SerializeHierarchy(const ConceptHierarchy& h) {
  return Json{{"upper", h.upper}, {"lower", h.lower}}.dump() + "\n";
}

ClassCounts Classify(const ScoreMatrix& matrix) {
  matrix.Validate();
  if (matrix.num_cols() == 0) {
    throw Error(ErrorKind::kInvalidInput, "classify needs at least one column");
  }
  ClassCounts c;
  c.ids = matrix.cols;
  c.counts.assign(matrix.num_cols(), 0);
  for (const auto& row : matrix.values) {
    const auto best = std::max_element(row.begin(), row.end()) - row.begin();
    ++c.counts[static_cast<size_t>(best)];
    ++c.total;
  }
  return c;
}

ClassCounts Classify(const ScoreMatrix& matrix, const ConceptHierarchy& h) {
  if (matrix.col_texts != h.lower) {
    throw Error(ErrorKind::kInvalidInput,
                "matrix columns are not the hierarchy's lower concepts");
  }
  return Classify(matrix);
}

double HarmonicMeanDiversity(std::span<const double> uncertainties, std::string* warning) {
  if (uncertainties.empty()) {
    throw Error(ErrorKind::kInvalidInput, "harmonic mean needs at least one value");
  }
  double inv = 0.0;
  for (double u : uncertainties) {
    if (!(u >= 0.0) || !std::isfinite(u)) {
      throw Error(ErrorKind::kInvalidInput, "uncertainties must be finite and non-negative");
    }
    if (u == 0.0) {
      if (warning) *warning = "a lower concept has zero uncertainty; harmonic diversity is 0";
      return 0.0;
    }
    inv += 1.0 / u;
  }
  return static_cast<double>(uncertainties.size()) / inv;
}

double EntropyDiversity(const ClassCounts& counts) {
  size_t sum = 0;
  for (size_t n : counts.counts) sum += n;
  if (sum == 0 || sum != counts.total) {
    throw Error(ErrorKind::kInvalidInput, "entropy needs counts summing to N >= 1");
  }
  const double total = static_cast<double>(sum);
  double h = 0.0;
  for (size_t n : counts.counts) {
    if (n == 0) continue;
    const double p = static_cast<double>(n) / total;
    h -= p * std::log(p);
  }
  return h == 0.0 ? 0.0 : h;
}

std::vector<CorpusStory> ParseStoryCorpus(std::string_view jsonl) {
  std::vector<CorpusStory> out;
  const auto lines = SplitLines(jsonl);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    try {
      const Json j = Json::parse(lines[i]);
      CorpusStory s;
      s.text = j.at("text").get<std::string>();
      if (Trim(s.text).empty()) throw Error(ErrorKind::kSchema, "empty story text");
      if (j.contains("intended_class") && !j["intended_class"].is_null()) {
        s.intended_class = j["intended_class"].get<std::string>();
      }
      out.push_back(std::move(s));
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::kSchema,
                  "corpus line " + std::to_string(i + 1) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::kSchema,
                  "corpus line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (out.empty()) throw Error(ErrorKind::kInvalidInput, "story corpus is empty");
  return out;
}

std::vector<OutputSample> CorpusSamples(std::span<const CorpusStory> corpus) {
  std::vector<OutputSample> out;
  for (size_t i = 0; i < corpus.size(); ++i) {
    out.push_back({static_cast<int>(i), corpus[i].text, "corpus", ""});
  }
  return out;
}

DiversityReport RunDiversity(std::span<const OutputSample> samples,
                             std::span<const CorpusStory> corpus,
                             const ConceptHierarchy& h, NliScorer& scorer,
                             const ScoringOptions& options, double epsilon) {
  h.Validate();
  if (samples.empty()) throw Error(ErrorKind::kInvalidInput, "no stories to score");
  DiversityReport r;
  r.hierarchy = h;
  const ScoreMatrix matrix = ComputeScoreMatrix(samples, h.AsPool(), scorer, options);
  r.uncertainty = ComputeUncertaintyReport(matrix, epsilon);
  r.counts = Classify(matrix, h);
  r.harmonic = HarmonicMeanDiversity(r.uncertainty.Values(), &r.warning);
  r.entropy = EntropyDiversity(r.counts);

  if (corpus.size() == samples.size()) {
    for (size_t i = 0; i < corpus.size(); ++i) {
      const std::string cls = corpus[i].intended_class.value_or("");
      auto it = std::find_if(r.confusion.begin(), r.confusion.end(),
                             [&](const auto& p) { return p.first == cls; });
      if (it == r.confusion.end()) {
        r.confusion.emplace_back(cls, std::vector<size_t>(h.lower.size(), 0));
        it = r.confusion.end() - 1;
      }
      const auto& row = matrix.values[i];
      ++it->second[static_cast<size_t>(std::max_element(row.begin(), row.end()) -
                                       row.begin())];
    }
  }
  return r;
}

std::string SerializeDiversityReport(const DiversityReport& r) {
  Json concepts = Json::array();
  for (size_t j = 0; j < r.uncertainty.entries.size(); ++j) {
    const auto& e = r.uncertainty.entries[j];
    concepts.push_back({{"id", e.id},
                        {"text", e.text},
                        {"uncertainty", e.uncertainty},
                        {"count", r.counts.counts[j]}});
  }
  Json confusion = Json::object();
  for (const auto& [cls, row] : r.confusion) {
    if (!cls.empty()) confusion[cls] = row;
  }
  Json j = {{"upper", r.hierarchy.upper},
            {"N", r.counts.total},
            {"epsilon", r.uncertainty.epsilon},
            {"concepts", concepts},
            {"harmonic_mean_diversity", r.harmonic},
            {"entropy_diversity", r.entropy},
            {"intended_class_counts", confusion}};
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j.dump(1) + "\n";
}

}  // namespace clue
