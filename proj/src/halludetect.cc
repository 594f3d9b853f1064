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

#include "clue/halludetect.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "clue/error.h"
#include "clue/util.h"

namespace clue {

namespace {

constexpr AnswerRole kRoles[] = {AnswerRole::kRelevant, AnswerRole::kLessRelevant,
                                 AnswerRole::kIrrelevant};

std::string NormalizeLabel(std::string_view label) {
  std::string out;
  for (unsigned char c : label) {
    if (c == ' ' || c == '-') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  return out;
}

// 1 for a positive (correct / entailment) label, 0 for a negative one.
int PolarityOf(const RawInstance& inst, const RawAnswer& a, DatasetKind kind) {
  if (!a.label) {
    throw Error(ErrorKind::kSchema, "instance " + inst.id + ": answer has no label");
  }
  const std::string l = NormalizeLabel(*a.label);
  if (kind == DatasetKind::kWikiQa) {
    if (l == "correct" || l == "1" || l == "true") return 1;
    if (l == "incorrect" || l == "0" || l == "false") return 0;
  } else {
    if (l == "entailment") return 1;
    if (l == "not_entailment") return 0;
  }
  throw Error(ErrorKind::kSchema,
              "instance " + inst.id + ": unknown label '" + *a.label + "'");
}

Json CurvesToJson(const std::vector<CurvePoint>& pts) {
  Json arr = Json::array();
  for (const auto& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

}  // namespace

std::string_view DatasetKindName(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kEli5: return "eli5";
    case DatasetKind::kWikiQa: return "wikiqa";
    case DatasetKind::kQnli: return "qnli";
  }
  return "eli5";
}

DatasetKind DatasetKindFromName(std::string_view name) {
  if (name == "eli5") return DatasetKind::kEli5;
  if (name == "wikiqa") return DatasetKind::kWikiQa;
  if (name == "qnli") return DatasetKind::kQnli;
  throw Error(ErrorKind::kInvalidInput, "unknown dataset kind '" + std::string(name) + "'");
}

std::vector<RawInstance> ParseRawDataset(std::string_view jsonl) {
  std::vector<RawInstance> out;
  std::set<std::string> ids;
  const auto lines = SplitLines(jsonl);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    const std::string where = "dataset line " + std::to_string(i + 1);
    try {
      const Json j = Json::parse(lines[i]);
      RawInstance inst;
      inst.id = j.at("id").get<std::string>();
      inst.question = j.at("question").get<std::string>();
      if (inst.id.empty() || Trim(inst.question).empty()) {
        throw Error(ErrorKind::kSchema, "id and question must be non-empty");
      }
      if (!ids.insert(inst.id).second) {
        throw Error(ErrorKind::kSchema, "duplicate instance id " + inst.id);
      }
      for (const auto& a : j.at("answers")) {
        RawAnswer ans;
        ans.text = a.at("text").get<std::string>();
        if (Trim(ans.text).empty()) throw Error(ErrorKind::kSchema, "empty answer text");
        if (a.contains("score") && !a["score"].is_null()) {
          ans.score = a["score"].get<double>();
        }
        if (a.contains("label") && !a["label"].is_null()) {
          ans.label = a["label"].get<std::string>();
        }
        inst.answers.push_back(std::move(ans));
      }
      out.push_back(std::move(inst));
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::kSchema, where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::kSchema, where + ": " + e.what());
    }
  }
  return out;
}

const QAAnswer* QAInstance::Find(AnswerRole role) const {
  for (const auto& a : answers) {
    if (a.role == role) return &a;
  }
  return nullptr;
}

SubsetBuild BuildSubsets(std::span<const RawInstance> raw, DatasetKind kind,
                         uint64_t rng_seed) {
  // Flattened answer list; each instance's answers occupy [begin, end).
  std::vector<std::pair<size_t, size_t>> flat;
  std::vector<size_t> begin(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    begin[i] = flat.size();
    for (size_t a = 0; a < raw[i].answers.size(); ++a) flat.emplace_back(i, a);
  }

  std::mt19937_64 rng(rng_seed);
  SubsetBuild out;
  for (size_t i = 0; i < raw.size(); ++i) {
    const RawInstance& inst = raw[i];
    std::optional<size_t> relevant;
    std::optional<size_t> less;

    switch (kind) {
      case DatasetKind::kEli5: {
        for (size_t a = 0; a < inst.answers.size(); ++a) {
          const auto& s = inst.answers[a].score;
          if (!s) continue;
          if (!relevant || *s > *inst.answers[*relevant].score) relevant = a;
        }
        for (size_t a = 0; relevant && a < inst.answers.size(); ++a) {
          const auto& s = inst.answers[a].score;
          if (!s || a == *relevant) continue;
          if (!less || *s < *inst.answers[*less].score) less = a;
        }
        if (!less) relevant.reset();
        break;
      }
      case DatasetKind::kWikiQa:
      case DatasetKind::kQnli: {
        std::vector<size_t> pos;
        std::vector<size_t> neg;
        for (size_t a = 0; a < inst.answers.size(); ++a) {
          (PolarityOf(inst, inst.answers[a], kind) ? pos : neg).push_back(a);
        }
        if (kind == DatasetKind::kWikiQa && (pos.empty() || neg.empty())) break;
        if (!pos.empty()) relevant = pos[rng() % pos.size()];
        if (!neg.empty()) less = neg[rng() % neg.size()];
        break;
      }
    }

    const size_t own = inst.answers.size();
    const size_t others = flat.size() - own;
    if ((!relevant && !less) || others == 0) {
      ++out.skipped;
      continue;
    }
    size_t k = rng() % others;
    if (k >= begin[i]) k += own;
    const auto [src, ans] = flat[k];

    QAInstance q;
    q.id = inst.id;
    q.question = inst.question;
    q.source_dataset = std::string(DatasetKindName(kind));
    if (relevant) {
      q.answers.push_back({inst.answers[*relevant].text, AnswerRole::kRelevant, inst.id});
    }
    if (less) {
      q.answers.push_back({inst.answers[*less].text, AnswerRole::kLessRelevant, inst.id});
    }
    q.answers.push_back({raw[src].answers[ans].text, AnswerRole::kIrrelevant, raw[src].id});
    out.instances.push_back(std::move(q));
  }
  return out;
}

void Thresholds::Validate() const {
  if (!(low >= 0.0 && low < high && high <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput,
                "thresholds must satisfy 0 <= theta_l < theta_h <= 1");
  }
}

int LabelForScore(double answer_score, const Thresholds& t) {
  if (answer_score > t.high) return kEntailed;
  if (answer_score < t.low) return kHallucinated;
  return kExcluded;
}

std::vector<LabeledConcept> LabelConcepts(const AnswerScores& relevant,
                                          std::span<const double> uncertainty,
                                          const Thresholds& t) {
  t.Validate();
  if (relevant.role != AnswerRole::kRelevant) {
    throw Error(ErrorKind::kInvalidInput, "concepts are labeled from the relevant answer only");
  }
  if (relevant.scores.size() != uncertainty.size() ||
      relevant.concept_ids.size() != uncertainty.size()) {
    throw Error(ErrorKind::kInvalidInput, "answer scores and uncertainties differ in length");
  }
  std::vector<LabeledConcept> out;
  out.reserve(uncertainty.size());
  for (size_t j = 0; j < uncertainty.size(); ++j) {
    out.push_back({relevant.concept_ids[j], relevant.scores[j],
                   LabelForScore(relevant.scores[j], t), uncertainty[j]});
  }
  return out;
}

std::string SerializeDatasetRun(const DatasetRun& run) {
  Json instances = Json::array();
  for (const auto& r : run.instances) {
    Json scores = Json::object();
    for (const auto& [role, v] : r.answer_scores) scores[std::string(AnswerRoleName(role))] = v;
    instances.push_back({{"id", r.id},
                         {"question", r.question},
                         {"concept_ids", r.concept_ids},
                         {"concept_texts", r.concept_texts},
                         {"uncertainty", r.uncertainty},
                         {"answer_scores", scores},
                         {"question_relevance", r.question_relevance}});
  }
  const Json j = {{"dataset_kind", run.dataset_kind},
                  {"seed", run.seed},
                  {"skipped_instances", run.skipped_instances},
                  {"instances", instances}};
  return j.dump(1) + "\n";
}

DatasetRun ParseDatasetRun(std::string_view json) {
  DatasetRun run;
  try {
    const Json j = Json::parse(json);
    run.dataset_kind = j.at("dataset_kind").get<std::string>();
    run.seed = j.at("seed").get<uint64_t>();
    run.skipped_instances = j.at("skipped_instances").get<size_t>();
    for (const auto& r : j.at("instances")) {
      InstanceResult res;
      res.id = r.at("id").get<std::string>();
      res.question = r.value("question", "");
      res.concept_ids = r.at("concept_ids").get<std::vector<std::string>>();
      res.concept_texts = r.value("concept_texts", std::vector<std::string>{});
      res.uncertainty = r.at("uncertainty").get<std::vector<double>>();
      for (const auto& [role, v] : r.at("answer_scores").items()) {
        res.answer_scores[AnswerRoleFromName(role)] = v.get<std::vector<double>>();
      }
      res.question_relevance = r.value("question_relevance", std::vector<double>{});
      run.instances.push_back(std::move(res));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("dataset run: ") + e.what());
  }
  return run;
}

const RoleCorrelation& CorrelationStudy::For(AnswerRole role) const {
  for (const auto& r : roles) {
    if (r.role == role) return r;
  }
  throw Error(ErrorKind::kInvalidInput, "role missing from correlation study");
}

CorrelationStudy RunCorrelationStudy(std::span<const InstanceResult> results) {
  CorrelationStudy study;
  for (AnswerRole role : kRoles) {
    RoleCorrelation rc;
    rc.role = role;
    double sum = 0.0;
    for (const auto& r : results) {
      auto it = r.answer_scores.find(role);
      if (it == r.answer_scores.end()) continue;
      try {
        const double p = Pearson(r.uncertainty, it->second);
        rc.per_instance.emplace_back(r.id, p);
        sum += p;
        ++rc.valid;
      } catch (const Error&) {
        ++rc.excluded;
      }
    }
    if (rc.valid > 0) rc.mean = sum / static_cast<double>(rc.valid);
    study.roles.push_back(std::move(rc));
  }
  return study;
}

Json ToJson(const CorrelationStudy& study) {
  Json j = Json::object();
  for (const auto& rc : study.roles) {
    Json per = Json::object();
    for (const auto& [id, v] : rc.per_instance) per[id] = v;
    j[std::string(AnswerRoleName(rc.role))] = {
        {"mean_pearson", rc.mean ? Json(*rc.mean) : Json(nullptr)},
        {"valid_instances", rc.valid},
        {"excluded_instances", rc.excluded},
        {"per_instance", per}};
  }
  return j;
}

std::string RenderCorrelationTable(const CorrelationStudy& study,
                                   std::string_view dataset_name) {
  std::ostringstream out;
  out << "Dataset        Subset           Pearson   Valid  Excluded\n";
  for (const auto& rc : study.roles) {
    char line[128];
    const std::string value = rc.mean ? [&] {
      char b[32];
      std::snprintf(b, sizeof(b), "%.3f", *rc.mean);
      return std::string(b);
    }() : std::string("n/a");
    std::snprintf(line, sizeof(line), "%-14.14s %-15s %8s %7zu %9zu\n",
                  std::string(dataset_name).c_str(),
                  std::string(AnswerRoleName(rc.role)).c_str(), value.c_str(),
                  rc.valid, rc.excluded);
    out << line;
  }
  return out.str();
}

std::string_view DetectionMethodName(DetectionMethod method) {
  return method == DetectionMethod::kUncertainty ? "uncertainty" : "question_baseline";
}

DetectionMethod DetectionMethodFromName(std::string_view name) {
  if (name == "uncertainty") return DetectionMethod::kUncertainty;
  if (name == "question_baseline") return DetectionMethod::kQuestionBaseline;
  throw Error(ErrorKind::kInvalidInput, "unknown detection method '" + std::string(name) + "'");
}

DetectionMetrics EvaluateDetection(std::span<const InstanceResult> results,
                                   const Thresholds& t, DetectionMethod method) {
  t.Validate();
  std::vector<const InstanceResult*> ordered;
  for (const auto& r : results) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->id < b->id; });

  DetectionMetrics m;
  m.method = method;
  m.thresholds = t;
  double auroc_sum = 0.0;
  double auprc_sum = 0.0;
  for (const InstanceResult* r : ordered) {
    auto it = r->answer_scores.find(AnswerRole::kRelevant);
    if (it == r->answer_scores.end()) {
      ++m.skipped_instances;
      continue;
    }
    const auto& answer = it->second;
    const auto& source =
        method == DetectionMethod::kUncertainty ? r->uncertainty : r->question_relevance;
    if (answer.size() != source.size()) {
      throw Error(ErrorKind::kInvalidInput,
                  "instance " + r->id + ": " + std::string(DetectionMethodName(method)) +
                      " scores do not cover the concept pool");
    }
    std::vector<int> labels;
    std::vector<double> scores;
    for (size_t j = 0; j < answer.size(); ++j) {
      const int label = LabelForScore(answer[j], t);
      if (label == kExcluded) {
        ++m.excluded_concepts;
        continue;
      }
      labels.push_back(label);
      scores.push_back(method == DetectionMethod::kUncertainty ? source[j]
                                                               : 1.0 - source[j]);
    }
    m.labeled_concepts += labels.size();
    m.pooled_labels.insert(m.pooled_labels.end(), labels.begin(), labels.end());
    m.pooled_scores.insert(m.pooled_scores.end(), scores.begin(), scores.end());
    const size_t pos = static_cast<size_t>(std::count(labels.begin(), labels.end(), 1));
    const size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) {
      ++m.skipped_instances;
      continue;
    }
    InstanceMetrics im{r->id, Auroc(labels, scores), Auprc(labels, scores), pos, neg};
    auroc_sum += im.auroc;
    auprc_sum += im.auprc;
    m.per_instance.push_back(std::move(im));
  }
  if (m.per_instance.empty()) {
    throw Error(ErrorKind::kEvaluationEmpty,
                "no instance has both entailed and hallucinated concepts at theta_h=" +
                    std::to_string(t.high) + ", theta_l=" + std::to_string(t.low));
  }
  const double n = static_cast<double>(m.per_instance.size());
  m.macro_auroc = auroc_sum / n;
  m.macro_auprc = auprc_sum / n;
  m.micro_auroc = Auroc(m.pooled_labels, m.pooled_scores);
  m.micro_auprc = Auprc(m.pooled_labels, m.pooled_scores);
  return m;
}

Json ToJson(const DetectionMetrics& m) {
  Json per = Json::array();
  for (const auto& im : m.per_instance) {
    per.push_back({{"id", im.id},
                   {"auroc", im.auroc},
                   {"auprc", im.auprc},
                   {"positives", im.positives},
                   {"negatives", im.negatives}});
  }
  return {{"method", DetectionMethodName(m.method)},
          {"theta_h", m.thresholds.high},
          {"theta_l", m.thresholds.low},
          {"macro_auroc", m.macro_auroc},
          {"macro_auprc", m.macro_auprc},
          {"micro_auroc", m.micro_auroc},
          {"micro_auprc", m.micro_auprc},
          {"evaluated_instances", m.per_instance.size()},
          {"skipped_instances", m.skipped_instances},
          {"labeled_concepts", m.labeled_concepts},
          {"excluded_concepts", m.excluded_concepts},
          {"per_instance", per}};
}

std::vector<SweepRow> ThresholdSweep(std::span<const InstanceResult> results,
                                     std::span<const Thresholds> pairs,
                                     DetectionMethod method) {
  if (pairs.empty()) throw Error(ErrorKind::kInvalidInput, "sweep needs threshold pairs");
  for (const auto& t : pairs) t.Validate();
  std::vector<SweepRow> rows;
  for (const auto& t : pairs) {
    SweepRow row;
    row.thresholds = t;
    try {
      row.metrics = EvaluateDetection(results, t, method);
      row.roc = RocCurve(row.metrics->pooled_labels, row.metrics->pooled_scores);
      row.pr = PrCurve(row.metrics->pooled_labels, row.metrics->pooled_scores);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kEvaluationEmpty &&
          e.kind() != ErrorKind::kMetricUndefined) {
        throw;
      }
      row.metrics.reset();
      row.error = std::string(ErrorKindName(e.kind())) + ": " + e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json ToJson(std::span<const SweepRow> rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j = {{"theta_h", r.thresholds.high}, {"theta_l", r.thresholds.low}};
    if (r.metrics) {
      j["metrics"] = ToJson(*r.metrics);
      j["roc"] = CurvesToJson(r.roc);
      j["pr"] = CurvesToJson(r.pr);
    } else {
      j["metrics"] = nullptr;
      j["error"] = r.error;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string SweepCurvesCsv(std::span<const SweepRow> rows) {
  std::string out = "theta_h,theta_l,curve,x,y\n";
  char line[128];
  for (const auto& r : rows) {
    for (const auto* curve : {&r.roc, &r.pr}) {
      const char* name = curve == &r.roc ? "roc" : "pr";
      for (const auto& p : *curve) {
        std::snprintf(line, sizeof(line), "%.6g,%.6g,%s,%.17g,%.17g\n",
                      r.thresholds.high, r.thresholds.low, name, p.x, p.y);
        out += line;
      }
    }
  }
  return out;
}

std::vector<Thresholds> ParseThresholdPairs(std::string_view text) {
  std::vector<Thresholds> out;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (item.empty()) continue;
    const size_t colon = item.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::kInvalidInput, "threshold pair '" + item + "' is not high:low");
    }
    Thresholds t;
    try {
      size_t used = 0;
      const std::string h = item.substr(0, colon);
      const std::string l = item.substr(colon + 1);
      t.high = std::stod(h, &used);
      if (used != h.size()) throw std::invalid_argument(h);
      t.low = std::stod(l, &used);
      if (used != l.size()) throw std::invalid_argument(l);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::kInvalidInput, "threshold pair '" + item + "' is not numeric");
    }
    t.Validate();
    out.push_back(t);
  }
  if (out.empty()) throw Error(ErrorKind::kInvalidInput, "no threshold pairs given");
  return out;
}

}  // namespace clue
