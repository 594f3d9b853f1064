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

#ifndef CLUE_CACHE_H_
#define CLUE_CACHE_H_

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "clue/backends.h"

namespace clue {

struct CacheEntry {
  std::string key;
  std::string value;
  std::string created_at;  // ISO-8601 UTC
};

// Append-only, file-backed key/value store. Each entry lives in
// <dir>/<key[0:2]>/<key>.json and is published with write-then-rename, so
// concurrent readers only ever see complete entries. Existing keys are never
// overwritten.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<CacheEntry> Get(std::string_view key) const;
  // No-op when the key already exists.
  void Put(std::string_view key, std::string_view value);

  const std::filesystem::path& dir() const { return dir_; }

  // Content hash of (backend id, canonical request payload).
  static std::string Key(std::string_view backend_id, std::string_view payload);

 private:
  std::filesystem::path PathFor(std::string_view key) const;

  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;
};

// Decorators that consult the cache before delegating to the wrapped backend.
// `inner_calls()` counts delegated (network) operations.
class CachingGenerator : public Generator {
 public:
  CachingGenerator(std::shared_ptr<Generator> inner,
                   std::shared_ptr<ResponseCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}

  std::string id() const override { return inner_->id(); }
  std::vector<OutputSample> Generate(const GenerationRequest& request) override;

  size_t inner_calls() const { return inner_calls_; }

 private:
  std::shared_ptr<Generator> inner_;
  std::shared_ptr<ResponseCache> cache_;
  std::atomic<size_t> inner_calls_{0};
};

class CachingNliScorer : public NliScorer {
 public:
  CachingNliScorer(std::shared_ptr<NliScorer> inner,
                   std::shared_ptr<ResponseCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}

  std::string id() const override { return inner_->id(); }
  NliLogits Score(std::string_view premise, std::string_view hypothesis) override;
  std::vector<NliLogits> ScoreBatch(std::span<const NliPair> pairs) override;

  size_t inner_calls() const { return inner_calls_; }

 private:
  std::string KeyFor(std::string_view premise, std::string_view hypothesis) const;

  std::shared_ptr<NliScorer> inner_;
  std::shared_ptr<ResponseCache> cache_;
  std::atomic<size_t> inner_calls_{0};
};

}  // namespace clue

#endif  // CLUE_CACHE_H_
