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

#include "clue/cache.h"

#include <chrono>
#include <ctime>
#include <mutex>

#include "clue/error.h"
#include "clue/util.h"

namespace clue {

namespace {

std::string NowUtc() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string ResponseCache::Key(std::string_view backend_id,
                               std::string_view payload) {
  std::string material(backend_id);
  material += '\n';
  material += payload;
  return Sha256Hex(material);
}

std::filesystem::path ResponseCache::PathFor(std::string_view key) const {
  if (key.size() < 3) {
    throw Error(ErrorKind::kInvalidInput, "cache key too short");
  }
  return dir_ / std::string(key.substr(0, 2)) / (std::string(key) + ".json");
}

std::optional<CacheEntry> ResponseCache::Get(std::string_view key) const {
  const auto path = PathFor(key);
  std::shared_lock lock(mu_);
  if (!std::filesystem::exists(path)) return std::nullopt;
  const Json j = Json::parse(ReadFile(path));
  return CacheEntry{j.at("key").get<std::string>(),
                    j.at("value").get<std::string>(),
                    j.at("created_at").get<std::string>()};
}

void ResponseCache::Put(std::string_view key, std::string_view value) {
  const auto path = PathFor(key);
  std::unique_lock lock(mu_);
  if (std::filesystem::exists(path)) return;
  const Json j = {{"key", key}, {"value", value}, {"created_at", NowUtc()}};
  WriteFileAtomic(path, j.dump());
}

std::vector<OutputSample> CachingGenerator::Generate(
    const GenerationRequest& request) {
  request.Validate();
  const std::string key = ResponseCache::Key(inner_->id(), request.Canonical());
  if (auto hit = cache_->Get(key)) {
    std::vector<OutputSample> out;
    for (const auto& s : Json::parse(hit->value)) out.push_back(SampleFromJson(s));
    return out;
  }
  ++inner_calls_;
  auto samples = inner_->Generate(request);
  Json arr = Json::array();
  for (const auto& s : samples) arr.push_back(ToJson(s));
  cache_->Put(key, arr.dump());
  return samples;
}

std::string CachingNliScorer::KeyFor(std::string_view premise,
                                     std::string_view hypothesis) const {
  const Json payload = {{"premise", premise}, {"hypothesis", hypothesis}};
  return ResponseCache::Key(inner_->id(), payload.dump());
}

NliLogits CachingNliScorer::Score(std::string_view premise,
                                  std::string_view hypothesis) {
  const std::string key = KeyFor(premise, hypothesis);
  if (auto hit = cache_->Get(key)) return LogitsFromJson(Json::parse(hit->value));
  ++inner_calls_;
  const NliLogits logits = inner_->Score(premise, hypothesis);
  cache_->Put(key, ToJson(logits).dump());
  return logits;
}

std::vector<NliLogits> CachingNliScorer::ScoreBatch(
    std::span<const NliPair> pairs) {
  std::vector<NliLogits> out(pairs.size());
  std::vector<size_t> missing;
  std::vector<std::string> keys(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    keys[i] = KeyFor(pairs[i].premise, pairs[i].hypothesis);
    if (auto hit = cache_->Get(keys[i])) {
      out[i] = LogitsFromJson(Json::parse(hit->value));
    } else {
      missing.push_back(i);
    }
  }
  if (missing.empty()) return out;
  std::vector<NliPair> todo;
  todo.reserve(missing.size());
  for (size_t i : missing) todo.push_back(pairs[i]);
  inner_calls_ += todo.size();
  const auto fresh = inner_->ScoreBatch(todo);
  for (size_t k = 0; k < missing.size(); ++k) {
    out[missing[k]] = fresh[k];
    cache_->Put(keys[missing[k]], ToJson(fresh[k]).dump());
  }
  return out;
}

}  // namespace clue
