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

#include "clue/extraction.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <random>
#include <regex>
#include <set>

#include "clue/error.h"
#include "clue/parallel.h"
#include "clue/util.h"

namespace clue {

namespace {

constexpr std::string_view kPromptHead =
    "Extract high-level concepts like the following example:\n"
    "paragraph: \"Basketball, a beloved sport worldwide, has come a long way "
    "since its humble beginnings in the late 19th century. The game was "
    "originally created by Dr. James Naismith in 1891 as a way to keep his "
    "students active during the winter months. Back then, players used a "
    "soccer ball and peach baskets as makeshift goals. Fast forward to the "
    "modern era, and basketball has transformed into a high-paced, "
    "adrenaline-pumping spectacle. With legendary athletes like Michael "
    "Jordan, LeBron James, and Kobe Bryant gracing the courts, and the "
    "introduction of the slam dunk, three-point shot, and shot clock, the "
    "sport has evolved into an art form that captivates fans around the "
    "globe. The NBA, with its star-studded roster and global reach, is a "
    "testament to basketball's enduring popularity and its remarkable journey "
    "from humble beginnings to a multimillion-dollar industry.\"\n"
    "concepts:\"'Basketball's origins', 'Evolution of basketball', 'Modern era "
    "of basketball', 'Legendary basketball athletes', 'Basketball's global "
    "popularity', 'Basketball as an art form', 'Basketball as a "
    "multimillion-dollar industry'\"\n"
    "\n"
    "paragraph: ";
constexpr std::string_view kPromptTail = "\nconcepts:";

constexpr std::string_view kQuoteChars = "'\"`";

bool IsQuote(char c) { return kQuoteChars.find(c) != std::string_view::npos; }

std::string StripLabel(std::string s) {
  for (;;) {
    s = Trim(s);
    if (s.size() >= 9) {
      std::string head = s.substr(0, 9);
      std::transform(head.begin(), head.end(), head.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if (head == "concepts:") {
        s = s.substr(9);
        continue;
      }
    }
    return s;
  }
}

std::string CleanItem(std::string item) {
  for (char& c : item) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  item = Trim(item);
  for (;;) {
    const size_t before = item.size();
    // A trailing sentence terminator outside the closing quote.
    if (item.size() >= 2 && (item.back() == '.' || item.back() == ';') &&
        IsQuote(item[item.size() - 2])) {
      item.pop_back();
    }
    while (!item.empty() && IsQuote(item.front())) item.erase(item.begin());
    while (!item.empty() && IsQuote(item.back())) item.pop_back();
    item = Trim(item);
    if (item.size() == before) return item;
  }
}

std::vector<std::string> SplitItems(const std::string& body) {
  std::vector<std::string> items;
  if (body.empty()) return items;
  const char first = body.front();
  if (first == '\'' || first == '"') {
    const std::string q(1, first);
    const std::regex sep(q + R"(\s*,\s*)" + q);
    std::copy(std::sregex_token_iterator(body.begin(), body.end(), sep, -1),
              std::sregex_token_iterator(), std::back_inserter(items));
    return items;
  }
  if (body.find('\n') != std::string::npos) {
    static const std::regex bullet(R"(^\s*(?:[-*•]|\d+[.)])\s*)");
    for (const auto& line : SplitLines(body)) {
      items.push_back(std::regex_replace(line, bullet, ""));
    }
    return items;
  }
  size_t start = 0;
  for (;;) {
    const size_t comma = body.find(',', start);
    items.push_back(body.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

// Union-find with path halving.
size_t FindRoot(std::vector<size_t>& parent, size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::string SerializePool(const ConceptPool& pool) {
  const Json header = {{"origin_request_hash", pool.origin_request_hash},
                       {"threshold", pool.threshold},
                       {"rng_seed", pool.rng_seed}};
  std::string out = header.dump() + "\n";
  for (const auto& c : pool.concepts) {
    const Json j = {{"id", c.id},
                    {"text", c.text},
                    {"sources", c.sources},
                    {"merged_from", c.merged_from}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

ConceptPool ParsePool(std::string_view jsonl) {
  ConceptPool pool;
  const auto lines = SplitLines(jsonl);
  bool have_header = false;
  std::set<std::string> ids;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    try {
      const Json j = Json::parse(lines[i]);
      if (!have_header) {
        pool.origin_request_hash = j.at("origin_request_hash").get<std::string>();
        pool.threshold = j.at("threshold").get<double>();
        pool.rng_seed = j.at("rng_seed").get<uint64_t>();
        have_header = true;
        continue;
      }
      Concept c;
      c.id = j.at("id").get<std::string>();
      c.text = j.at("text").get<std::string>();
      c.sources = j.at("sources").get<std::vector<int>>();
      c.merged_from = j.value("merged_from", std::vector<std::string>{});
      if (c.text.empty() || c.sources.empty()) {
        throw Error(ErrorKind::kSchema, "concept needs text and sources");
      }
      if (!ids.insert(c.id).second) {
        throw Error(ErrorKind::kSchema, "duplicate concept id " + c.id);
      }
      pool.concepts.push_back(std::move(c));
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::kSchema,
                  "pool line " + std::to_string(i + 1) + ": " + e.what());
    } catch (const Error& e) {
      throw e.WithContext("pool line " + std::to_string(i + 1));
    }
  }
  if (!have_header) throw Error(ErrorKind::kSchema, "pool file has no header line");
  return pool;
}

std::string RenderExtractionPrompt(std::string_view sequence) {
  std::string out(kPromptHead);
  out += sequence;
  out += kPromptTail;
  return out;
}

std::optional<std::string> ExtractionTarget(std::string_view prompt) {
  if (prompt.size() < kPromptHead.size() + kPromptTail.size()) return std::nullopt;
  if (prompt.substr(0, kPromptHead.size()) != kPromptHead) return std::nullopt;
  if (prompt.substr(prompt.size() - kPromptTail.size()) != kPromptTail) {
    return std::nullopt;
  }
  return std::string(prompt.substr(
      kPromptHead.size(), prompt.size() - kPromptHead.size() - kPromptTail.size()));
}

std::vector<std::string> ParseConcepts(std::string_view raw) {
  std::string body(raw);
  // Models sometimes continue with another one-shot round.
  if (const size_t cut = body.find("\nparagraph:"); cut != std::string::npos) {
    body.resize(cut);
  }
  body = StripLabel(body);
  while (body.size() >= 2 && body.back() == '.' &&
         (body[body.size() - 2] == '"' || body[body.size() - 2] == '\'' ||
          body[body.size() - 2] == ']')) {
    body.pop_back();
  }
  if (body.size() >= 2 && body.front() == '[' && body.back() == ']') {
    body = Trim(body.substr(1, body.size() - 2));
  }
  if (body.size() >= 2 && body.front() == '"' && body.back() == '"' &&
      body.find('"', 1) == body.size() - 1) {
    body = Trim(body.substr(1, body.size() - 2));
  }

  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto& item : SplitItems(body)) {
    std::string c = CleanItem(std::move(item));
    if (c.empty() || c.size() > kMaxConceptLength) continue;
    if (seen.insert(c).second) out.push_back(std::move(c));
  }
  if (out.empty()) {
    throw Error(ErrorKind::kExtractionParse,
                "no parseable concepts in completion: " + std::string(raw));
  }
  return out;
}

std::string FormatConceptList(std::span<const std::string> concepts) {
  std::string out;
  for (size_t i = 0; i < concepts.size(); ++i) {
    if (i) out += ", ";
    out += "'" + concepts[i] + "'";
  }
  return out;
}

std::vector<std::string> DeriveMockConcepts(std::string_view paragraph) {
  constexpr size_t kMaxConcepts = 6;
  constexpr size_t kWordsPerConcept = 4;
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::vector<std::string> clause;
  auto flush = [&] {
    std::vector<std::string> words;
    for (const auto& w : clause) {
      if (!ContentTokens(w).empty()) words.push_back(w);
      if (words.size() == kWordsPerConcept) break;
    }
    clause.clear();
    if (words.size() < 2 || out.size() >= kMaxConcepts) return;
    std::string phrase;
    for (const auto& w : words) phrase += (phrase.empty() ? "" : " ") + w;
    phrase[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(phrase[0])));
    if (seen.insert(phrase).second) out.push_back(phrase);
  };
  std::string word;
  for (unsigned char ch : paragraph) {
    if (std::isalnum(ch) || ch == '-') {
      word.push_back(static_cast<char>(ch));
      continue;
    }
    if (!word.empty()) clause.push_back(std::move(word));
    word.clear();
    if (std::string_view(".,;:!?").find(static_cast<char>(ch)) != std::string_view::npos) {
      flush();
    }
  }
  if (!word.empty()) clause.push_back(std::move(word));
  flush();
  if (out.empty()) {
    const std::string t = Trim(paragraph);
    out.push_back(t.substr(0, std::min<size_t>(t.size(), 60)));
  }
  return out;
}

MockGenerator::Responder MakeExtractionResponder(MockCorpus corpus) {
  return [corpus = std::move(corpus)](std::string_view prompt) -> std::optional<std::string> {
    auto target = ExtractionTarget(prompt);
    if (!target) return std::nullopt;
    const MockCorpusEntry* entry = corpus.FindByText(*target);
    if (entry && !entry->concepts.empty()) return FormatConceptList(entry->concepts);
    return FormatConceptList(DeriveMockConcepts(*target));
  };
}

std::string SimilarityHypothesis(std::string_view concept_text) {
  return "This concept is similar to " + std::string(concept_text);
}

SimilarityMatrix ScoreSimilarity(std::span<const Concept> concepts,
                                 NliScorer& scorer, size_t workers,
                                 size_t batch_size) {
  const size_t m = concepts.size();
  SimilarityMatrix probs(m, std::vector<double>(m, 1.0));
  std::vector<NliPair> pairs;
  std::vector<std::pair<size_t, size_t>> coords;
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      pairs.push_back({concepts[i].text, SimilarityHypothesis(concepts[j].text)});
      coords.emplace_back(i, j);
    }
  }
  const auto logits = ScorePairs(scorer, pairs, workers, batch_size, [&](size_t k) {
    return "consolidating concepts " + concepts[coords[k].first].id + " -> " +
           concepts[coords[k].second].id;
  });
  for (size_t k = 0; k < pairs.size(); ++k) {
    probs[coords[k].first][coords[k].second] = EntailmentProbability(logits[k]);
  }
  return probs;
}

std::vector<Concept> ConsolidateWithScores(std::span<const Concept> concepts,
                                           const SimilarityMatrix& probs,
                                           double threshold, uint64_t rng_seed) {
  if (!(threshold > 0.5 && threshold <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput,
                "consolidation threshold must be in (0.5, 1.0]");
  }
  const size_t m = concepts.size();
  if (probs.size() != m) {
    throw Error(ErrorKind::kInvalidInput, "similarity matrix has wrong shape");
  }
  std::vector<size_t> parent(m);
  std::iota(parent.begin(), parent.end(), size_t{0});
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i + 1; j < m; ++j) {
      if (probs[i][j] > threshold && probs[j][i] > threshold) {
        const size_t a = FindRoot(parent, i);
        const size_t b = FindRoot(parent, j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  // Roots are the smallest member index, so iterating roots in index order
  // yields groups ordered by earliest member.
  std::map<size_t, std::vector<size_t>> groups;
  for (size_t i = 0; i < m; ++i) groups[FindRoot(parent, i)].push_back(i);

  std::mt19937_64 rng(rng_seed);
  std::vector<Concept> out;
  out.reserve(groups.size());
  for (const auto& [root, members] : groups) {
    const size_t pick = members[rng() % members.size()];
    Concept rep = concepts[pick];
    std::set<int> sources;
    std::vector<std::string> merged;
    for (size_t idx : members) {
      const Concept& c = concepts[idx];
      sources.insert(c.sources.begin(), c.sources.end());
      if (idx != pick) merged.push_back(c.text);
      merged.insert(merged.end(), c.merged_from.begin(), c.merged_from.end());
    }
    rep.sources.assign(sources.begin(), sources.end());
    rep.merged_from = std::move(merged);
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<Concept> Consolidate(std::span<const Concept> concepts,
                                 NliScorer& scorer, double threshold,
                                 uint64_t rng_seed, size_t workers,
                                 size_t batch_size) {
  if (!(threshold > 0.5 && threshold <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput,
                "consolidation threshold must be in (0.5, 1.0]");
  }
  const auto probs = ScoreSimilarity(concepts, scorer, workers, batch_size);
  return ConsolidateWithScores(concepts, probs, threshold, rng_seed);
}

std::vector<Concept> UnionConcepts(
    std::span<const std::vector<std::string>> per_sample) {
  std::vector<Concept> out;
  std::map<std::string, size_t> by_text;
  for (size_t s = 0; s < per_sample.size(); ++s) {
    for (const auto& text : per_sample[s]) {
      auto [it, inserted] = by_text.emplace(text, out.size());
      if (inserted) {
        out.push_back({"c" + std::to_string(out.size()), text, {}, {}});
      }
      auto& sources = out[it->second].sources;
      if (sources.empty() || sources.back() != static_cast<int>(s)) {
        sources.push_back(static_cast<int>(s));
      }
    }
  }
  return out;
}

ConceptPool ExtractConcepts(std::span<const OutputSample> samples,
                            Generator& generator, NliScorer& scorer,
                            const ExtractionOptions& options) {
  if (samples.empty()) {
    throw Error(ErrorKind::kInvalidInput, "extraction needs at least one sample");
  }
  if (!(options.threshold > 0.5 && options.threshold <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput,
                "consolidation threshold must be in (0.5, 1.0]");
  }
  std::vector<std::vector<std::string>> per_sample(samples.size());
  ParallelFor(samples.size(), options.workers, [&](size_t i) {
    try {
      GenerationRequest req;
      req.prompt = RenderExtractionPrompt(samples[i].text);
      req.temperature = kExtractionTemperature;
      req.num_samples = 1;
      req.max_tokens = options.max_tokens;
      const auto reply = generator.Generate(req);
      per_sample[i] = ParseConcepts(reply.front().text);
    } catch (const Error& e) {
      throw e.WithContext("extracting concepts from sample " +
                          std::to_string(samples[i].index));
    }
  });

  ConceptPool pool;
  pool.threshold = options.threshold;
  pool.rng_seed = options.rng_seed;
  pool.origin_request_hash = samples.front().request_hash;
  for (const auto& s : samples) {
    if (s.request_hash != pool.origin_request_hash) {
      std::string joined;
      for (const auto& t : samples) joined += t.request_hash + "\n";
      pool.origin_request_hash = Sha256Hex(joined);
      break;
    }
  }
  const auto unioned = UnionConcepts(per_sample);
  pool.concepts = Consolidate(unioned, scorer, options.threshold, options.rng_seed,
                              options.workers, options.nli_batch_size);
  return pool;
}

}  // namespace clue
