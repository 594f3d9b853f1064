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

#include "clue/uncertainty.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "clue/error.h"
#include "clue/util.h"

namespace clue {

double ConceptUncertainty(std::span<const double> scores, double epsilon) {
  if (scores.empty()) {
    throw Error(ErrorKind::kInvalidInput, "uncertainty needs at least one score");
  }
  if (!(epsilon > 0.0 && epsilon <= 1e-3)) {
    throw Error(ErrorKind::kInvalidInput, "epsilon must be in (0, 1e-3]");
  }
  double sum = 0.0;
  for (double s : scores) sum += std::log(std::max(s, epsilon));
  const double u = -sum / static_cast<double>(scores.size());
  // -0.0 when every score is exactly 1.
  return u == 0.0 ? 0.0 : u;
}

std::vector<ConceptUncertaintyEntry> UncertaintyReport::Ranked() const {
  auto ranked = entries;
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.uncertainty != b.uncertainty) return a.uncertainty > b.uncertainty;
    return a.id < b.id;
  });
  return ranked;
}

std::vector<double> UncertaintyReport::Values() const {
  std::vector<double> v;
  v.reserve(entries.size());
  for (const auto& e : entries) v.push_back(e.uncertainty);
  return v;
}

UncertaintyReport ComputeUncertaintyReport(const ScoreMatrix& matrix,
                                           double epsilon) {
  matrix.Validate();
  if (matrix.num_rows() == 0 || matrix.num_cols() == 0) {
    throw Error(ErrorKind::kInvalidInput, "uncertainty needs a non-empty matrix");
  }
  UncertaintyReport r;
  r.num_samples = matrix.num_rows();
  r.epsilon = epsilon;
  r.provenance.samples_hash = matrix.provenance.samples_hash;
  r.provenance.pool_hash = matrix.provenance.pool_hash;
  r.provenance.matrix_hash = Sha256Hex(SerializeMatrix(matrix));
  for (size_t j = 0; j < matrix.num_cols(); ++j) {
    const auto col = matrix.Column(j);
    r.entries.push_back({matrix.cols[j],
                         matrix.col_texts.empty() ? std::string() : matrix.col_texts[j],
                         ConceptUncertainty(col, epsilon)});
  }
  return r;
}

void CheckAgainstPool(const UncertaintyReport& report, const ConceptPool& pool) {
  if (report.entries.size() != pool.concepts.size()) {
    throw Error(ErrorKind::kInvalidInput,
                "report covers " + std::to_string(report.entries.size()) +
                    " concepts, pool has " + std::to_string(pool.concepts.size()));
  }
  for (size_t j = 0; j < pool.concepts.size(); ++j) {
    if (report.entries[j].id != pool.concepts[j].id) {
      throw Error(ErrorKind::kInvalidInput,
                  "report concept " + report.entries[j].id +
                      " does not match pool concept " + pool.concepts[j].id);
    }
  }
}

std::string SerializeUncertaintyReport(const UncertaintyReport& report) {
  Json concepts = Json::array();
  for (const auto& e : report.Ranked()) {
    concepts.push_back({{"id", e.id}, {"text", e.text}, {"uncertainty", e.uncertainty}});
  }
  Json order = Json::array();
  for (const auto& e : report.entries) order.push_back(e.id);
  const Json j = {{"concepts", concepts},
                  {"pool_order", order},
                  {"N", report.num_samples},
                  {"epsilon", report.epsilon},
                  {"provenance",
                   {{"samples_hash", report.provenance.samples_hash},
                    {"pool_hash", report.provenance.pool_hash},
                    {"matrix_hash", report.provenance.matrix_hash}}}};
  return j.dump(1) + "\n";
}

UncertaintyReport ParseUncertaintyReport(std::string_view json) {
  UncertaintyReport r;
  try {
    const Json j = Json::parse(json);
    r.num_samples = j.at("N").get<size_t>();
    r.epsilon = j.at("epsilon").get<double>();
    const Json& p = j.at("provenance");
    r.provenance = {p.value("samples_hash", ""), p.value("pool_hash", ""),
                    p.value("matrix_hash", "")};
    std::vector<ConceptUncertaintyEntry> ranked;
    for (const auto& c : j.at("concepts")) {
      ranked.push_back({c.at("id").get<std::string>(), c.value("text", ""),
                        c.at("uncertainty").get<double>()});
    }
    const auto order = j.value("pool_order", std::vector<std::string>{});
    if (order.empty()) {
      r.entries = std::move(ranked);
    } else {
      for (const auto& id : order) {
        auto it = std::find_if(ranked.begin(), ranked.end(),
                               [&](const auto& e) { return e.id == id; });
        if (it == ranked.end()) {
          throw Error(ErrorKind::kSchema, "pool_order names unknown concept " + id);
        }
        r.entries.push_back(*it);
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("uncertainty report: ") + e.what());
  }
  return r;
}

std::string RenderUncertaintyTable(const UncertaintyReport& report) {
  size_t width = 7;
  for (const auto& e : report.entries) width = std::max(width, e.text.size());
  std::string out;
  char line[64];
  std::snprintf(line, sizeof(line), "%-6s  ", "Id");
  out += line;
  out += "Concept" + std::string(width - 7, ' ') + "  Uncertainty\n";
  for (const auto& e : report.Ranked()) {
    std::snprintf(line, sizeof(line), "%-6s  ", e.id.c_str());
    out += line;
    out += e.text + std::string(width - e.text.size(), ' ');
    std::snprintf(line, sizeof(line), "  %11.3f\n", e.uncertainty);
    out += line;
  }
  std::snprintf(line, sizeof(line), "N = %zu, epsilon = %g\n", report.num_samples,
                report.epsilon);
  out += line;
  return out;
}

}  // namespace clue
