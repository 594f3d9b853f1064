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

#include "clue/http_backends.h"

#include <cmath>
#include <thread>

#include "clue/error.h"
#include "httplib.h"

namespace clue {

namespace {

bool Retryable(int status) { return status == 0 || status == 429 || status >= 500; }

// Retries transient failures; returns the first non-retryable response.
HttpResponse PostWithRetry(HttpTransport& transport, const std::string& path,
                           const std::string& body, const RetryPolicy& policy,
                           const HttpHeaders& headers) {
  const int attempts = policy.attempts < 1 ? 1 : policy.attempts;
  auto delay = policy.initial_backoff;
  HttpResponse last;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    last = transport.Post(path, body, headers);
    if (!Retryable(last.status)) return last;
    if (attempt < attempts && delay.count() > 0) {
      std::this_thread::sleep_for(delay);
      delay = std::chrono::milliseconds(static_cast<int64_t>(
          std::llround(static_cast<double>(delay.count()) * policy.multiplier)));
    }
  }
  std::string why = last.status == 0 ? last.transport_error
                                     : "HTTP " + std::to_string(last.status);
  throw Error(ErrorKind::kBackendUnavailable,
              transport.base_url() + path + " failed after " +
                  std::to_string(attempts) + " attempts: " + why);
}

Json ParseReply(const HttpTransport& transport, const std::string& path,
                const HttpResponse& r) {
  if (r.status == 413) {
    throw Error(ErrorKind::kInputTooLong, transport.base_url() + path +
                                              " rejected oversize input");
  }
  if (r.status < 200 || r.status >= 300) {
    throw Error(ErrorKind::kBackendProtocol,
                transport.base_url() + path + " returned HTTP " +
                    std::to_string(r.status) + ": " + r.body.substr(0, 200));
  }
  try {
    return Json::parse(r.body);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kBackendProtocol,
                transport.base_url() + path + " returned invalid JSON: " + e.what());
  }
}

HttpHeaders BearerHeaders(const std::string& api_key) {
  if (api_key.empty()) return {};
  return {{"Authorization", "Bearer " + api_key}};
}

}  // namespace

HttplibTransport::HttplibTransport(std::string base_url, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  const size_t scheme = base_url_.find("://");
  const size_t slash =
      base_url_.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  origin_ = base_url_.substr(0, slash);
  prefix_ = slash == std::string::npos ? "" : base_url_.substr(slash);
}

HttpResponse HttplibTransport::Post(const std::string& path,
                                    const std::string& body,
                                    const HttpHeaders& headers) {
  httplib::Client client(origin_);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);
  client.set_write_timeout(timeout_seconds_, 0);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(prefix_ + path, h, body, "application/json");
  HttpResponse out;
  if (!res) {
    out.transport_error = httplib::to_string(res.error());
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  return out;
}

Json PostJsonWithRetry(HttpTransport& transport, const std::string& path,
                       const Json& body, const RetryPolicy& policy,
                       const HttpHeaders& headers) {
  const HttpResponse r = PostWithRetry(transport, path, body.dump(), policy, headers);
  return ParseReply(transport, path, r);
}

HttpGenerator::HttpGenerator(std::shared_ptr<HttpTransport> transport,
                             GenerationWireFormat format, std::string api_key,
                             std::string model, RetryPolicy retry)
    : transport_(std::move(transport)),
      format_(format),
      api_key_(std::move(api_key)),
      model_(std::move(model)),
      retry_(retry) {}

std::string HttpGenerator::id() const {
  if (format_ == GenerationWireFormat::kOpenAiCompletions) {
    return "openai:" + transport_->base_url() + ":" + model_;
  }
  return "http:" + transport_->base_url();
}

std::vector<OutputSample> HttpGenerator::Generate(const GenerationRequest& request) {
  request.Validate();
  Json body = {{"prompt", request.prompt},
               {"temperature", request.temperature},
               {"n", request.num_samples},
               {"max_tokens", request.max_tokens}};
  std::string path = "/generate";
  std::string list_key = "samples";
  if (format_ == GenerationWireFormat::kOpenAiCompletions) {
    body["model"] = model_;
    path = "/v1/completions";
    list_key = "choices";
  }
  const Json reply =
      PostJsonWithRetry(*transport_, path, body, retry_, BearerHeaders(api_key_));

  std::vector<std::string> texts(static_cast<size_t>(request.num_samples));
  std::vector<bool> seen(texts.size(), false);
  try {
    const Json& items = reply.at(list_key);
    if (items.size() != texts.size()) {
      throw Error(ErrorKind::kBackendProtocol,
                  "expected " + std::to_string(texts.size()) + " samples, got " +
                      std::to_string(items.size()));
    }
    for (const auto& item : items) {
      const int index = item.at("index").get<int>();
      if (index < 0 || index >= static_cast<int>(texts.size()) || seen[index]) {
        throw Error(ErrorKind::kBackendProtocol,
                    "bad or duplicate sample index " + std::to_string(index));
      }
      seen[index] = true;
      texts[index] = item.at("text").get<std::string>();
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kBackendProtocol,
                std::string("malformed generation reply: ") + e.what());
  }
  return MakeSampleBatch(std::move(texts), request, id());
}

HttpNliScorer::HttpNliScorer(std::shared_ptr<HttpTransport> transport,
                             std::string api_key, size_t max_chars,
                             RetryPolicy retry)
    : transport_(std::move(transport)),
      api_key_(std::move(api_key)),
      max_chars_(max_chars),
      retry_(retry) {}

std::string HttpNliScorer::id() const { return "http-nli:" + transport_->base_url(); }

HttpHeaders HttpNliScorer::Headers() const { return BearerHeaders(api_key_); }

NliLogits HttpNliScorer::Score(std::string_view premise,
                               std::string_view hypothesis) {
  ValidateNliInput(premise, hypothesis, max_chars_);
  const Json body = {{"premise", premise}, {"hypothesis", hypothesis}};
  const Json reply = PostJsonWithRetry(*transport_, "/score", body, retry_, Headers());
  try {
    return LogitsFromJson(reply.at("logits"));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kBackendProtocol,
                std::string("malformed NLI reply: ") + e.what());
  }
}

std::vector<NliLogits> HttpNliScorer::ScoreBatch(std::span<const NliPair> pairs) {
  for (const auto& p : pairs) ValidateNliInput(p.premise, p.hypothesis, max_chars_);
  std::vector<NliLogits> out;
  out.reserve(pairs.size());
  size_t done = 0;
  while (done < pairs.size() && batch_supported_) {
    const size_t end = std::min(pairs.size(), done + kMaxBatch);
    Json list = Json::array();
    for (size_t i = done; i < end; ++i) {
      list.push_back({{"premise", pairs[i].premise},
                      {"hypothesis", pairs[i].hypothesis}});
    }
    const Json body = {{"pairs", list}};
    const HttpResponse r =
        PostWithRetry(*transport_, "/score_batch", body.dump(), retry_, Headers());
    if (r.status == 404) {
      batch_supported_ = false;
      break;
    }
    const Json reply = ParseReply(*transport_, "/score_batch", r);
    try {
      const Json& logits = reply.at("logits");
      if (logits.size() != end - done) {
        throw Error(ErrorKind::kBackendProtocol, "score_batch size mismatch");
      }
      for (const auto& l : logits) out.push_back(LogitsFromJson(l));
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::kBackendProtocol,
                  std::string("malformed score_batch reply: ") + e.what());
    }
    done = end;
  }
  for (; done < pairs.size(); ++done) {
    out.push_back(Score(pairs[done].premise, pairs[done].hypothesis));
  }
  return out;
}

}  // namespace clue
