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

#ifndef CLUE_MOCK_BACKENDS_H_
#define CLUE_MOCK_BACKENDS_H_

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clue/backends.h"

namespace clue {

// One candidate generation. Entries with a prompt are only drawn for that
// exact prompt; entries without one serve every prompt that has no entries
// of its own. `concepts`, when present, is what an extraction call over this
// text returns.
struct MockCorpusEntry {
  std::optional<std::string> prompt;
  std::string text;
  std::vector<std::string> concepts;
};

struct MockCorpus {
  std::vector<MockCorpusEntry> entries;

  // JSONL: {"prompt": str|null, "text": str, "concepts": [str]|null}.
  static MockCorpus FromJsonl(std::string_view jsonl);
  // The Apple founder example outputs and a few explanatory paragraphs.
  static MockCorpus BuiltIn();

  const MockCorpusEntry* FindByText(std::string_view text) const;
};

// Deterministic generator. Samples are drawn by seeded pseudo-random
// selection among the corpus entries for the prompt; at temperature 0 the
// first candidate is always returned. The draw is a pure function of the
// canonical request (including its seed), so separate processes agree.
//
// A responder, when set, is consulted first and may answer a prompt
// directly; the pipeline installs one that answers concept-extraction
// prompts from the corpus.
class MockGenerator : public Generator {
 public:
  using Responder =
      std::function<std::optional<std::string>(std::string_view prompt)>;

  explicit MockGenerator(MockCorpus corpus, Responder responder = {});

  std::string id() const override { return "mock-generator/v1"; }
  std::vector<OutputSample> Generate(const GenerationRequest& request) override;

  const MockCorpus& corpus() const { return corpus_; }

 private:
  MockCorpus corpus_;
  Responder responder_;
};

// Lowercased content tokens used by the overlap scorer: alphanumeric runs
// of length >= 2, stopwords and hypothesis-template words removed, plural
// 's' stripped from words longer than three characters.
std::vector<std::string> ContentTokens(std::string_view text);

// NLI stand-in computing logits from token overlap. With r the fraction of
// distinct hypothesis content tokens present in the premise:
//   entailment = k * (2r - 1), contradiction = -entailment, neutral = 0.
// Identical texts (and hypotheses without content tokens that equal the
// premise) score r = 1; otherwise an empty hypothesis token set gives r = 0.5.
class MockNliScorer : public NliScorer {
 public:
  static constexpr double kDefaultSharpness = 4.0;

  explicit MockNliScorer(double sharpness = kDefaultSharpness,
                         size_t max_chars = kDefaultNliMaxChars)
      : sharpness_(sharpness), max_chars_(max_chars) {}

  std::string id() const override { return "mock-nli/v1"; }
  NliLogits Score(std::string_view premise, std::string_view hypothesis) override;

  // Fraction r in [0, 1] described above.
  static double Coverage(std::string_view premise, std::string_view hypothesis);

 private:
  double sharpness_;
  size_t max_chars_;
};

}  // namespace clue

#endif  // CLUE_MOCK_BACKENDS_H_
