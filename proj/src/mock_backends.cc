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

#include "clue/mock_backends.h"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

#include "clue/error.h"
#include "clue/util.h"

namespace clue {

namespace {

constexpr std::string_view kApplePrompt =
    "Answer the question in one single sentence with details: Who is the "
    "founder of Apple?";
constexpr std::string_view kAppleFounders =
    "Co-founders of Apple (Steve Jobs, Steve Wozniak, Ronald Wayne)";
constexpr std::string_view kAppleEstablished = "Apple's establishment in 1976";

}  // namespace

MockCorpus MockCorpus::FromJsonl(std::string_view jsonl) {
  MockCorpus corpus;
  const auto lines = SplitLines(jsonl);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    try {
      const Json j = Json::parse(lines[i]);
      MockCorpusEntry e;
      if (j.contains("prompt") && !j["prompt"].is_null()) {
        e.prompt = j["prompt"].get<std::string>();
      }
      e.text = j.at("text").get<std::string>();
      if (j.contains("concepts") && !j["concepts"].is_null()) {
        e.concepts = j["concepts"].get<std::vector<std::string>>();
      }
      if (Trim(e.text).empty()) {
        throw Error(ErrorKind::kSchema, "empty text");
      }
      corpus.entries.push_back(std::move(e));
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::kSchema,
                  "mock corpus line " + std::to_string(i + 1) + ": " + e.what());
    } catch (const Error& e) {
      throw e.WithContext("mock corpus line " + std::to_string(i + 1));
    }
  }
  return corpus;
}

MockCorpus MockCorpus::BuiltIn() {
  const std::string prompt(kApplePrompt);
  MockCorpus c;
  c.entries = {
      {prompt,
       "The co-founder of Apple is Steve Jobs, who, along with Steve Wozniak "
       "and Ronald Wayne, established the company on April 1, 1976, in "
       "Cupertino, California.",
       {std::string(kAppleFounders), std::string(kAppleEstablished),
        "Location of Apple's establishment (Cupertino, California)"}},
      {prompt,
       "Steve Jobs, along with Steve Wozniak and Ronald Wayne, co-founded "
       "Apple Inc. in 1976, revolutionizing the technology industry with "
       "iconic products like the iPhone and MacBook.",
       {std::string(kAppleFounders), std::string(kAppleEstablished),
        "Iconic Apple products: iPhone and MacBook"}},
      {prompt,
       "Apple was founded by Steve Jobs, Steve Wozniak, and Ronald Wayne, "
       "originating in a garage in Los Altos.",
       {std::string(kAppleFounders), "Origination in a garage in Los Altos"}},
      {prompt,
       "Apple's inception in 1976 was marked by the collaboration of Steve "
       "Jobs, Steve Wozniak, and Ronald Wayne, but Wayne sold his stake "
       "shortly after, missing out on Apple's immense success.",
       {std::string(kAppleFounders), std::string(kAppleEstablished),
        "Ronald Wayne's stake sale", "Missed opportunity for Ronald Wayne"}},
      {std::nullopt,
       "Saliva production increases when we yawn to keep the mouth lubricated "
       "and prevent dryness. When we yawn, the muscles in our face and throat "
       "contract, causing the movement of saliva and sometimes causing it to "
       "shoot out of our mouths. This is a normal and harmless bodily "
       "reaction.",
       {"Saliva production and yawning",
        "Purpose of saliva production during yawning",
        "Muscles involved in yawning", "Saliva shooting out during yawning",
        "Normal bodily reaction"}},
      {std::nullopt,
       "The sun does not get oxygen from space. The sun is primarily composed "
       "of hydrogen and helium, and the process of nuclear fusion creates the "
       "energy and light that we see as sunlight. It does not rely on oxygen "
       "for this process.",
       {"Composition of the sun", "Nuclear fusion in the sun",
        "Sunlight as a product of nuclear fusion", "Sun's energy source",
        "Sun's lack of reliance on oxygen"}},
      {std::nullopt,
       "When we are asleep, our eyes are still functioning, but our brain "
       "switches off our ability to send visual signals to the conscious "
       "mind. This means that while we may still react to bright lights or "
       "movements in our sleep, we are not consciously seeing in the same way "
       "as we do while awake.",
       {"Sleep and vision", "Brain activity during sleep",
        "Consciousness and visual signals", "Reactions during sleep",
        "Difference between awake and asleep vision"}},
      {std::nullopt,
       "Darkness is the absence of light, and cannot be directly measured as "
       "a physical quantity. Light can be measured using units such as lumens "
       "or lux, but darkness cannot be quantified in the same way.",
       {"Darkness as the absence of light", "Measurement of light",
        "Inability to measure darkness"}},
  };
  return c;
}

const MockCorpusEntry* MockCorpus::FindByText(std::string_view text) const {
  const std::string needle = Trim(text);
  for (const auto& e : entries) {
    if (Trim(e.text) == needle) return &e;
  }
  return nullptr;
}

MockGenerator::MockGenerator(MockCorpus corpus, Responder responder)
    : corpus_(std::move(corpus)), responder_(std::move(responder)) {}

std::vector<OutputSample> MockGenerator::Generate(
    const GenerationRequest& request) {
  request.Validate();
  const size_t n = static_cast<size_t>(request.num_samples);
  std::vector<std::string> texts;
  texts.reserve(n);

  if (responder_) {
    if (auto answer = responder_(request.prompt)) {
      texts.assign(n, *answer);
      return MakeSampleBatch(std::move(texts), request, id());
    }
  }

  std::vector<const MockCorpusEntry*> candidates;
  for (const auto& e : corpus_.entries) {
    if (e.prompt && *e.prompt == request.prompt) candidates.push_back(&e);
  }
  if (candidates.empty()) {
    for (const auto& e : corpus_.entries) {
      if (!e.prompt) candidates.push_back(&e);
    }
  }
  if (candidates.empty()) {
    texts.assign(n, "Mock response to: " + request.prompt);
    return MakeSampleBatch(std::move(texts), request, id());
  }

  if (request.temperature == 0.0) {
    texts.assign(n, candidates.front()->text);
    return MakeSampleBatch(std::move(texts), request, id());
  }

  // Successive seeded permutations of the candidates, so every candidate is
  // drawn once before any repeats.
  std::mt19937_64 rng(std::stoull(request.Hash().substr(0, 16), nullptr, 16));
  std::vector<size_t> order(candidates.size());
  for (size_t i = 0; i < n; ++i) {
    const size_t pos = i % order.size();
    if (pos == 0) {
      std::iota(order.begin(), order.end(), size_t{0});
      for (size_t k = order.size(); k > 1; --k) {
        std::swap(order[k - 1], order[rng() % k]);
      }
    }
    texts.push_back(candidates[order[pos]]->text);
  }
  return MakeSampleBatch(std::move(texts), request, id());
}

std::vector<std::string> ContentTokens(std::string_view text) {
  static const std::unordered_set<std::string> kStop = {
      "a",     "an",      "the",     "of",      "in",    "on",   "at",
      "to",    "for",     "and",     "or",      "but",   "is",   "are",
      "was",   "were",    "be",      "been",    "by",    "with", "as",
      "it",    "its",     "this",    "that",    "these", "those", "from",
      "about", "into",    "we",      "our",     "his",   "her",  "their",
      "who",   "which",   "what",    "does",    "do",    "not",  "has",
      "have",  "had",     "example", "concept", "similar", "question",
      "relevant"};
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 2 && !kStop.count(cur)) {
      if (cur.size() > 3 && cur.back() == 's' && cur[cur.size() - 2] != 's') {
        cur.pop_back();
      }
      tokens.push_back(cur);
    }
    cur.clear();
  };
  for (unsigned char ch : text) {
    if (std::isalnum(ch)) {
      cur.push_back(static_cast<char>(std::tolower(ch)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

double MockNliScorer::Coverage(std::string_view premise,
                               std::string_view hypothesis) {
  if (premise == hypothesis) return 1.0;
  const auto hyp = ContentTokens(hypothesis);
  const std::set<std::string> hyp_set(hyp.begin(), hyp.end());
  if (hyp_set.empty()) return 0.5;
  const auto prem = ContentTokens(premise);
  const std::set<std::string> prem_set(prem.begin(), prem.end());
  size_t hit = 0;
  for (const auto& t : hyp_set) hit += prem_set.count(t);
  return static_cast<double>(hit) / static_cast<double>(hyp_set.size());
}

NliLogits MockNliScorer::Score(std::string_view premise,
                               std::string_view hypothesis) {
  ValidateNliInput(premise, hypothesis, max_chars_);
  const double r = Coverage(premise, hypothesis);
  const double e = sharpness_ * (2.0 * r - 1.0);
  return {e, 0.0, -e};
}

}  // namespace clue
