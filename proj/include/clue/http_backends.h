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

#ifndef CLUE_HTTP_BACKENDS_H_
#define CLUE_HTTP_BACKENDS_H_

#include <atomic>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "clue/backends.h"

namespace clue {

struct HttpResponse {
  int status = 0;  // 0 means the request never completed
  std::string body;
  std::string transport_error;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual std::string base_url() const = 0;
  virtual HttpResponse Post(const std::string& path, const std::string& body,
                            const HttpHeaders& headers) = 0;
};

// cpp-httplib client. A fresh connection is opened per call, which keeps the
// transport safe to share between threads.
class HttplibTransport : public HttpTransport {
 public:
  // `base_url` is scheme://host[:port][/prefix]; the prefix is prepended to
  // every request path.
  explicit HttplibTransport(std::string base_url, int timeout_seconds = 60);

  std::string base_url() const override { return base_url_; }
  HttpResponse Post(const std::string& path, const std::string& body,
                    const HttpHeaders& headers) override;

 private:
  std::string base_url_;
  std::string origin_;
  std::string prefix_;
  int timeout_seconds_;
};

// POSTs `body` and parses the JSON reply. Connection failures, 429 and 5xx
// are retried with exponential backoff up to policy.attempts in total, then
// surface as kBackendUnavailable. 413 maps to kInputTooLong; other non-2xx
// statuses and unparseable bodies are kBackendProtocol and not retried.
Json PostJsonWithRetry(HttpTransport& transport, const std::string& path,
                       const Json& body, const RetryPolicy& policy,
                       const HttpHeaders& headers = {});

enum class GenerationWireFormat {
  // POST /generate {"prompt","temperature","n","max_tokens"}
  //   -> {"samples": [{"index", "text"}]}
  kNative,
  // POST /v1/completions {"model","prompt","temperature","n","max_tokens"}
  //   -> {"choices": [{"index", "text"}]}
  kOpenAiCompletions,
};

class HttpGenerator : public Generator {
 public:
  HttpGenerator(std::shared_ptr<HttpTransport> transport,
                GenerationWireFormat format, std::string api_key = {},
                std::string model = {}, RetryPolicy retry = {});

  std::string id() const override;
  std::vector<OutputSample> Generate(const GenerationRequest& request) override;

 private:
  std::shared_ptr<HttpTransport> transport_;
  GenerationWireFormat format_;
  std::string api_key_;
  std::string model_;
  RetryPolicy retry_;
};

// POST /score {"premise","hypothesis"}
//   -> {"logits": {"entailment","neutral","contradiction"}}
// ScoreBatch uses POST /score_batch {"pairs": [{"premise","hypothesis"}]}
//   -> {"logits": [{...}]} in chunks of kMaxBatch, and falls back to single
// calls for good once the server answers 404.
class HttpNliScorer : public NliScorer {
 public:
  static constexpr size_t kMaxBatch = 64;

  HttpNliScorer(std::shared_ptr<HttpTransport> transport,
                std::string api_key = {}, size_t max_chars = kDefaultNliMaxChars,
                RetryPolicy retry = {});

  std::string id() const override;
  NliLogits Score(std::string_view premise, std::string_view hypothesis) override;
  std::vector<NliLogits> ScoreBatch(std::span<const NliPair> pairs) override;

 private:
  HttpHeaders Headers() const;

  std::shared_ptr<HttpTransport> transport_;
  std::string api_key_;
  size_t max_chars_;
  RetryPolicy retry_;
  std::atomic<bool> batch_supported_{true};
};

}  // namespace clue

#endif  // CLUE_HTTP_BACKENDS_H_
