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

#include "clue/config.h"

#include <cctype>
#include <cstdlib>

#include "clue/error.h"
#include "clue/extraction.h"
#include "clue/http_backends.h"
#include "clue/mock_backends.h"
#include "clue/util.h"

namespace clue {

namespace {

RunConfig FromFullJson(const Json& j) {
  RunConfig c;
  const Json& g = j.at("generation");
  c.generation.base_url = g.at("base_url").get<std::string>();
  c.generation.api_key = g.at("api_key").get<std::string>();
  c.generation.api_format = g.at("api_format").get<std::string>();
  c.generation.model = g.at("model").get<std::string>();
  c.generation.temperature = g.at("temperature").get<double>();
  c.generation.n = g.at("n").get<int>();
  c.generation.max_tokens = g.at("max_tokens").get<int>();
  c.generation.mock_corpus = g.at("mock_corpus").get<std::string>();
  c.generation.timeout_seconds = g.at("timeout_seconds").get<int>();
  const Json& n = j.at("nli");
  c.nli.base_url = n.at("base_url").get<std::string>();
  c.nli.api_key = n.at("api_key").get<std::string>();
  c.nli.max_chars = n.at("max_chars").get<size_t>();
  c.nli.batch_size = n.at("batch_size").get<size_t>();
  c.nli.timeout_seconds = n.at("timeout_seconds").get<int>();
  c.cache.dir = j.at("cache").at("dir").get<std::string>();
  c.cache.enabled = j.at("cache").at("enabled").get<bool>();
  c.consolidation_threshold = j.at("consolidation").at("threshold").get<double>();
  c.epsilon = j.at("uncertainty").at("epsilon").get<double>();
  c.theta_h = j.at("detection").at("theta_h").get<double>();
  c.theta_l = j.at("detection").at("theta_l").get<double>();
  c.prompt_template = j.at("sampling").at("prompt_template").get<std::string>();
  c.seed = j.at("seed").get<uint64_t>();
  c.workers = j.at("workers").get<size_t>();
  c.retry_attempts = j.at("retry").at("attempts").get<int>();
  c.retry_backoff_ms = j.at("retry").at("backoff_ms").get<int>();
  return c;
}

void Overlay(Json& base, const Json& patch, const std::string& prefix) {
  if (!patch.is_object()) throw Error(ErrorKind::kConfig, "config must be a JSON object");
  for (const auto& [key, value] : patch.items()) {
    const std::string dotted = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) throw Error(ErrorKind::kConfig, "unknown config key " + dotted);
    Json& slot = base[key];
    if (slot.is_object()) {
      Overlay(slot, value, dotted);
      continue;
    }
    const bool ok = (slot.is_string() && value.is_string()) ||
                    (slot.is_boolean() && value.is_boolean()) ||
                    (slot.is_number_unsigned() && value.is_number_unsigned()) ||
                    (slot.is_number_integer() && !slot.is_number_unsigned() &&
                     value.is_number_integer()) ||
                    (slot.is_number_float() && value.is_number());
    if (!ok) throw Error(ErrorKind::kConfig, "config key " + dotted + " has the wrong type");
    slot = value;
  }
}

Json ParseEnvValue(const Json& like, const std::string& var, const std::string& text) {
  try {
    if (like.is_string()) return text;
    if (like.is_boolean()) {
      if (text == "1" || text == "true") return true;
      if (text == "0" || text == "false") return false;
      throw std::invalid_argument(text);
    }
    size_t used = 0;
    Json out;
    if (like.is_number_unsigned()) {
      if (!text.empty() && text[0] == '-') throw std::invalid_argument(text);
      out = static_cast<uint64_t>(std::stoull(text, &used));
    } else if (like.is_number_integer()) {
      out = static_cast<int64_t>(std::stoll(text, &used));
    } else {
      out = std::stod(text, &used);
    }
    if (used != text.size()) throw std::invalid_argument(text);
    return out;
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::kConfig, "environment variable " + var + " has invalid value '" +
                                        text + "'");
  }
}

void ApplyEnv(Json& node, const std::string& prefix, const EnvLookup& env) {
  for (auto& [key, value] : node.items()) {
    const std::string dotted = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      ApplyEnv(value, dotted, env);
      continue;
    }
    const std::string var = EnvVarFor(dotted);
    if (auto text = env(var)) value = ParseEnvValue(value, var, *text);
  }
}

}  // namespace

void RunConfig::Validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::kConfig, m); };
  if (generation.n < 1) fail("generation.n must be at least 1");
  if (!(generation.temperature >= 0.0 && generation.temperature <= 2.0)) {
    fail("generation.temperature must be in [0, 2]");
  }
  if (generation.max_tokens < 1) fail("generation.max_tokens must be positive");
  if (generation.api_format != "native" && generation.api_format != "openai") {
    fail("generation.api_format must be native or openai");
  }
  if (generation.api_format == "openai" && !generation.base_url.empty() &&
      generation.model.empty()) {
    fail("generation.model is required for the openai format");
  }
  if (nli.max_chars < 1) fail("nli.max_chars must be positive");
  if (nli.batch_size < 1 || nli.batch_size > 64) fail("nli.batch_size must be in [1, 64]");
  if (!(consolidation_threshold > 0.5 && consolidation_threshold <= 1.0)) {
    fail("consolidation.threshold must be in (0.5, 1]");
  }
  if (!(epsilon > 0.0 && epsilon <= 1e-3)) fail("uncertainty.epsilon must be in (0, 1e-3]");
  if (!(theta_l >= 0.0 && theta_l < theta_h && theta_h <= 1.0)) {
    fail("detection thresholds must satisfy 0 <= theta_l < theta_h <= 1");
  }
  if (prompt_template.find("{question}") == std::string::npos) {
    fail("sampling.prompt_template must contain {question}");
  }
  if (workers < 1 || workers > 256) fail("workers must be in [1, 256]");
  if (retry_attempts < 1) fail("retry.attempts must be at least 1");
  if (retry_backoff_ms < 0) fail("retry.backoff_ms must be non-negative");
  if (cache.enabled && cache.dir.empty()) fail("cache.dir is required when caching");
}

RetryPolicy RunConfig::Retry() const {
  RetryPolicy p;
  p.attempts = retry_attempts;
  p.initial_backoff = std::chrono::milliseconds(retry_backoff_ms);
  return p;
}

std::string RunConfig::RenderPrompt(std::string_view question) const {
  std::string out = prompt_template;
  const size_t at = out.find("{question}");
  if (at != std::string::npos) out.replace(at, 10, question);
  return out;
}

Json ToJson(const RunConfig& c, bool redact_secrets) {
  auto secret = [&](const std::string& s) {
    return redact_secrets && !s.empty() ? std::string("<redacted>") : s;
  };
  return {
      {"generation",
       {{"base_url", c.generation.base_url},
        {"api_key", secret(c.generation.api_key)},
        {"api_format", c.generation.api_format},
        {"model", c.generation.model},
        {"temperature", c.generation.temperature},
        {"n", c.generation.n},
        {"max_tokens", c.generation.max_tokens},
        {"mock_corpus", c.generation.mock_corpus},
        {"timeout_seconds", c.generation.timeout_seconds}}},
      {"nli",
       {{"base_url", c.nli.base_url},
        {"api_key", secret(c.nli.api_key)},
        {"max_chars", c.nli.max_chars},
        {"batch_size", c.nli.batch_size},
        {"timeout_seconds", c.nli.timeout_seconds}}},
      {"cache", {{"dir", c.cache.dir}, {"enabled", c.cache.enabled}}},
      {"consolidation", {{"threshold", c.consolidation_threshold}}},
      {"uncertainty", {{"epsilon", c.epsilon}}},
      {"detection", {{"theta_h", c.theta_h}, {"theta_l", c.theta_l}}},
      {"sampling", {{"prompt_template", c.prompt_template}}},
      {"seed", c.seed},
      {"workers", c.workers},
      {"retry", {{"attempts", c.retry_attempts}, {"backoff_ms", c.retry_backoff_ms}}},
  };
}

RunConfig MergeConfig(RunConfig base, const Json& j) {
  Json full = ToJson(base, false);
  Overlay(full, j, "");
  return FromFullJson(full);
}

std::string EnvVarFor(std::string_view dotted_key) {
  std::string out = "CLUE_";
  for (unsigned char ch : dotted_key) {
    out.push_back(ch == '.' ? '_' : static_cast<char>(std::toupper(ch)));
  }
  return out;
}

RunConfig LoadConfig(const std::optional<std::string>& path, const EnvLookup& env) {
  RunConfig c;
  if (path) {
    Json j;
    try {
      j = Json::parse(ReadFile(*path));
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::kConfig, "config file " + *path + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig, e.what());
    }
    c = MergeConfig(c, j);
  }
  Json full = ToJson(c, false);
  ApplyEnv(full, "", env);
  return FromFullJson(full);
}

EnvLookup ProcessEnv() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

Backends MakeBackends(const RunConfig& c) {
  Backends b;
  if (c.generation.base_url.empty()) {
    MockCorpus corpus = c.generation.mock_corpus.empty()
                            ? MockCorpus::BuiltIn()
                            : MockCorpus::FromJsonl(ReadFile(c.generation.mock_corpus));
    auto responder = MakeExtractionResponder(corpus);
    b.generator = std::make_shared<MockGenerator>(std::move(corpus), std::move(responder));
  } else {
    auto transport = std::make_shared<HttplibTransport>(c.generation.base_url,
                                                        c.generation.timeout_seconds);
    const auto format = c.generation.api_format == "openai"
                            ? GenerationWireFormat::kOpenAiCompletions
                            : GenerationWireFormat::kNative;
    b.generator = std::make_shared<HttpGenerator>(transport, format, c.generation.api_key,
                                                  c.generation.model, c.Retry());
  }
  if (c.nli.base_url.empty()) {
    b.scorer = std::make_shared<MockNliScorer>(MockNliScorer::kDefaultSharpness,
                                               c.nli.max_chars);
  } else {
    auto transport =
        std::make_shared<HttplibTransport>(c.nli.base_url, c.nli.timeout_seconds);
    b.scorer = std::make_shared<HttpNliScorer>(transport, c.nli.api_key, c.nli.max_chars,
                                               c.Retry());
  }
  if (c.cache.enabled) {
    auto cache = std::make_shared<ResponseCache>(c.cache.dir);
    b.generator = std::make_shared<CachingGenerator>(b.generator, cache);
    b.scorer = std::make_shared<CachingNliScorer>(b.scorer, cache);
  }
  return b;
}

}  // namespace clue
