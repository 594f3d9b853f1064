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

#ifndef CLUE_BACKENDS_H_
#define CLUE_BACKENDS_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace clue {

using Json = nlohmann::json;

// Sampling defaults: N = 5 sequences at temperature 1, extraction at 0.
inline constexpr int kDefaultNumSamples = 5;
inline constexpr double kDefaultSamplingTemperature = 1.0;
inline constexpr double kExtractionTemperature = 0.0;
inline constexpr int kDefaultMaxTokens = 256;
inline constexpr size_t kDefaultNliMaxChars = 4000;

struct GenerationRequest {
  std::string prompt;
  double temperature = kDefaultSamplingTemperature;
  int num_samples = kDefaultNumSamples;
  int max_tokens = kDefaultMaxTokens;
  // Only honoured by the mock generator.
  std::optional<int64_t> seed;

  // Throws kInvalidInput when N < 1, max_tokens < 1, the temperature is
  // outside [0, 2] or the prompt is empty.
  void Validate() const;

  // Keys are emitted in sorted order, so identical requests serialize to
  // identical bytes.
  Json ToJson() const;
  std::string Canonical() const { return ToJson().dump(); }
  std::string Hash() const;
};

struct OutputSample {
  int index = 0;
  std::string text;
  std::string backend_id;
  std::string request_hash;

  bool operator==(const OutputSample&) const = default;
};

Json ToJson(const OutputSample& sample);
OutputSample SampleFromJson(const Json& j);

// JSONL, one sample per line, each line terminated by '\n'.
std::string SerializeSamples(std::span<const OutputSample> samples);
std::vector<OutputSample> ParseSamples(std::string_view jsonl);

// Validates a raw batch of N generations (exact count, non-empty text) and
// stamps it with backend and request provenance.
std::vector<OutputSample> MakeSampleBatch(std::vector<std::string> texts,
                                          const GenerationRequest& request,
                                          std::string_view backend_id);

struct NliLogits {
  double entailment = 0.0;
  double neutral = 0.0;
  double contradiction = 0.0;

  bool operator==(const NliLogits&) const = default;
};

Json ToJson(const NliLogits& logits);
NliLogits LogitsFromJson(const Json& j);

// Softmax over the entailment and contradiction logits only; the neutral
// logit is ignored. Computed as 1 / (1 + exp(c - e)) on the max-shifted pair.
double EntailmentProbability(const NliLogits& logits);

struct NliPair {
  std::string premise;
  std::string hypothesis;
};

// Throws kInvalidInput for empty texts and kInputTooLong when either text
// exceeds `max_chars` code points.
void ValidateNliInput(std::string_view premise, std::string_view hypothesis,
                      size_t max_chars);

// Implementations must be safe for concurrent calls from several threads.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string id() const = 0;
  // Returns exactly request.num_samples samples in index order or throws.
  virtual std::vector<OutputSample> Generate(const GenerationRequest& request) = 0;
};

class NliScorer {
 public:
  virtual ~NliScorer() = default;
  virtual std::string id() const = 0;
  virtual NliLogits Score(std::string_view premise,
                          std::string_view hypothesis) = 0;
  // Results are positionally aligned with `pairs`.
  virtual std::vector<NliLogits> ScoreBatch(std::span<const NliPair> pairs);
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  double multiplier = 2.0;
};

// Scores every pair with bounded fan-out and returns logits aligned with
// `pairs`. With batch_size 1 each pair is a single Score call; larger sizes
// send chunks through ScoreBatch. Failures are rethrown with the context
// returned by describe(first index of the failing call).
std::vector<NliLogits> ScorePairs(
    NliScorer& scorer, std::span<const NliPair> pairs, size_t workers,
    size_t batch_size, const std::function<std::string(size_t)>& describe);

}  // namespace clue

#endif  // CLUE_BACKENDS_H_
