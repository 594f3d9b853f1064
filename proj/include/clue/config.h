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

#ifndef CLUE_CONFIG_H_
#define CLUE_CONFIG_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "clue/backends.h"
#include "clue/cache.h"

namespace clue {

inline constexpr std::string_view kDefaultPromptTemplate =
    "Answer the question in one single sentence with details: {question}";

struct GenerationConfig {
  std::string base_url;  // empty selects the mock generator
  std::string api_key;
  std::string api_format = "native";  // native | openai
  std::string model;
  double temperature = kDefaultSamplingTemperature;
  int n = kDefaultNumSamples;
  int max_tokens = kDefaultMaxTokens;
  std::string mock_corpus;  // JSONL; empty uses the built-in corpus
  int timeout_seconds = 60;
};

struct NliConfig {
  std::string base_url;  // empty selects the mock scorer
  std::string api_key;
  size_t max_chars = kDefaultNliMaxChars;
  size_t batch_size = 1;
  int timeout_seconds = 60;
};

struct CacheConfig {
  std::string dir = ".clue-cache";
  bool enabled = false;
};

struct RunConfig {
  GenerationConfig generation;
  NliConfig nli;
  CacheConfig cache;
  double consolidation_threshold = 0.99;
  double epsilon = 1e-12;
  double theta_h = 0.9;
  double theta_l = 0.1;
  std::string prompt_template{kDefaultPromptTemplate};
  uint64_t seed = 0;
  size_t workers = 4;
  int retry_attempts = 3;
  int retry_backoff_ms = 200;

  // Throws kConfig describing the first violated constraint.
  void Validate() const;
  RetryPolicy Retry() const;
  std::string RenderPrompt(std::string_view question) const;
};

// Nested JSON mirroring the dotted keys (generation.base_url, ...).
Json ToJson(const RunConfig& c, bool redact_secrets = true);
// Overlays the keys present in `j` onto `base`; unknown keys are kConfig.
RunConfig MergeConfig(RunConfig base, const Json& j);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// The environment variable for a dotted key: CLUE_ + upper-cased key with
// dots as underscores, e.g. CLUE_GENERATION_BASE_URL.
std::string EnvVarFor(std::string_view dotted_key);

// Default < file < environment. Flags are applied by the caller afterwards.
RunConfig LoadConfig(const std::optional<std::string>& path, const EnvLookup& env);
EnvLookup ProcessEnv();

struct Backends {
  std::shared_ptr<Generator> generator;
  std::shared_ptr<NliScorer> scorer;
};

// Mock backends for empty base URLs; HTTP otherwise. The mock generator
// answers extraction prompts from its corpus. Caching wraps both when
// enabled.
Backends MakeBackends(const RunConfig& c);

}  // namespace clue

#endif  // CLUE_CONFIG_H_
