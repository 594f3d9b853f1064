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

#include "clue/backends.h"

#include <algorithm>
#include <cmath>

#include "clue/error.h"
#include "clue/parallel.h"
#include "clue/util.h"

namespace clue {

void GenerationRequest::Validate() const {
  if (prompt.empty()) {
    throw Error(ErrorKind::kInvalidInput, "generation prompt is empty");
  }
  if (num_samples < 1) {
    throw Error(ErrorKind::kInvalidInput, "num_samples must be >= 1");
  }
  if (max_tokens < 1) {
    throw Error(ErrorKind::kInvalidInput, "max_tokens must be >= 1");
  }
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorKind::kInvalidInput, "temperature must be in [0, 2]");
  }
}

Json GenerationRequest::ToJson() const {
  Json j = {{"prompt", prompt},
            {"temperature", temperature},
            {"n", num_samples},
            {"max_tokens", max_tokens}};
  if (seed) j["seed"] = *seed;
  return j;
}

std::string GenerationRequest::Hash() const { return Sha256Hex(Canonical()); }

Json ToJson(const OutputSample& sample) {
  return {{"index", sample.index},
          {"text", sample.text},
          {"backend_id", sample.backend_id},
          {"request_hash", sample.request_hash}};
}

OutputSample SampleFromJson(const Json& j) {
  OutputSample s;
  s.index = j.at("index").get<int>();
  s.text = j.at("text").get<std::string>();
  s.backend_id = j.value("backend_id", std::string());
  s.request_hash = j.value("request_hash", std::string());
  return s;
}

std::string SerializeSamples(std::span<const OutputSample> samples) {
  std::string out;
  for (const auto& s : samples) {
    out += ToJson(s).dump();
    out += '\n';
  }
  return out;
}

std::vector<OutputSample> ParseSamples(std::string_view jsonl) {
  std::vector<OutputSample> samples;
  const auto lines = SplitLines(jsonl);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    try {
      samples.push_back(SampleFromJson(Json::parse(lines[i])));
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::kSchema,
                  "samples line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].index != static_cast<int>(i)) {
      throw Error(ErrorKind::kSchema,
                  "samples must be stored in index order 0..N-1");
    }
  }
  return samples;
}

std::vector<OutputSample> MakeSampleBatch(std::vector<std::string> texts,
                                          const GenerationRequest& request,
                                          std::string_view backend_id) {
  if (texts.size() != static_cast<size_t>(request.num_samples)) {
    throw Error(ErrorKind::kBackendProtocol,
                "expected " + std::to_string(request.num_samples) +
                    " samples, backend returned " +
                    std::to_string(texts.size()));
  }
  const std::string hash = request.Hash();
  std::vector<OutputSample> out;
  out.reserve(texts.size());
  for (size_t i = 0; i < texts.size(); ++i) {
    if (Trim(texts[i]).empty()) {
      throw Error(ErrorKind::kDegenerateOutput,
                  "empty generation at sample index " + std::to_string(i));
    }
    out.push_back({static_cast<int>(i), std::move(texts[i]),
                   std::string(backend_id), hash});
  }
  return out;
}

Json ToJson(const NliLogits& logits) {
  return {{"entailment", logits.entailment},
          {"neutral", logits.neutral},
          {"contradiction", logits.contradiction}};
}

NliLogits LogitsFromJson(const Json& j) {
  NliLogits l;
  l.entailment = j.at("entailment").get<double>();
  l.neutral = j.at("neutral").get<double>();
  l.contradiction = j.at("contradiction").get<double>();
  if (!std::isfinite(l.entailment) || !std::isfinite(l.neutral) ||
      !std::isfinite(l.contradiction)) {
    throw Error(ErrorKind::kBackendProtocol, "non-finite NLI logits");
  }
  return l;
}

double EntailmentProbability(const NliLogits& logits) {
  const double m = std::max(logits.entailment, logits.contradiction);
  const double e = std::exp(logits.entailment - m);
  const double c = std::exp(logits.contradiction - m);
  return e / (e + c);
}

void ValidateNliInput(std::string_view premise, std::string_view hypothesis,
                      size_t max_chars) {
  if (premise.empty() || hypothesis.empty()) {
    throw Error(ErrorKind::kInvalidInput, "NLI premise and hypothesis must be non-empty");
  }
  const size_t longest = std::max(Utf8Length(premise), Utf8Length(hypothesis));
  if (longest > max_chars) {
    throw Error(ErrorKind::kInputTooLong,
                "NLI input of " + std::to_string(longest) +
                    " characters exceeds limit " + std::to_string(max_chars));
  }
}

std::vector<NliLogits> NliScorer::ScoreBatch(std::span<const NliPair> pairs) {
  std::vector<NliLogits> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(Score(p.premise, p.hypothesis));
  return out;
}

std::vector<NliLogits> ScorePairs(
    NliScorer& scorer, std::span<const NliPair> pairs, size_t workers,
    size_t batch_size, const std::function<std::string(size_t)>& describe) {
  if (batch_size == 0) batch_size = 1;
  std::vector<NliLogits> out(pairs.size());
  const size_t chunks = (pairs.size() + batch_size - 1) / batch_size;
  ParallelFor(chunks, workers, [&](size_t chunk) {
    const size_t begin = chunk * batch_size;
    const size_t end = std::min(pairs.size(), begin + batch_size);
    try {
      if (end - begin == 1) {
        out[begin] = scorer.Score(pairs[begin].premise, pairs[begin].hypothesis);
      } else {
        const auto got = scorer.ScoreBatch(pairs.subspan(begin, end - begin));
        if (got.size() != end - begin) {
          throw Error(ErrorKind::kBackendProtocol,
                      "batch returned " + std::to_string(got.size()) + " results for " +
                          std::to_string(end - begin) + " pairs");
        }
        std::copy(got.begin(), got.end(), out.begin() + static_cast<long>(begin));
      }
    } catch (const Error& e) {
      throw e.WithContext(describe ? describe(begin) : "pair " + std::to_string(begin));
    }
  });
  return out;
}

}  // namespace clue
