// Copyright 2026 The stereoeval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Clients for the three external services: translation, quality estimation
// and token log-probability scoring.
//
// A *provider* performs one raw batch request and throws on failure. A
// *client* wraps a provider with batching, bounded retries, concurrent
// in-flight batches and a content-addressed cache, and reports failures per
// item. Results always come back in input order.
//
// Provider errors are classified by ErrorCode:
//   kBackend      transient (transport, 5xx, 429); retried with backoff
//   kData         the request was refused for these items (e.g. too long);
//                 a failed multi-item batch is retried item by item
//   kUnsupported  the backend does not handle the target language
//   kConfig       fatal; propagated out of the client call

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "stereoeval/error.hpp"

namespace stereoeval {

struct QeScore {
  double value = 0.0;
};

// Natural-log probabilities, one per token, covering the whole text.
struct TokenLogprobs {
  std::vector<std::string> tokens;
  std::vector<double> logprobs;
  bool operator==(const TokenLogprobs&) const = default;
};

// Throws DataError unless lengths match, T >= 1 and every logprob is finite
// and <= 0.
void ValidateTokenLogprobs(const TokenLogprobs& tl);

struct ModelRef {
  std::string model_id;
  std::string endpoint;
  nlohmann::json params = nlohmann::json::object();  // decoding parameters
};

template <typename T>
struct ItemResult {
  std::optional<T> value;
  ErrorCode error_code = ErrorCode::kBackend;
  std::string error;

  bool ok() const { return value.has_value(); }
  static ItemResult Ok(T v) { return {std::move(v), ErrorCode::kBackend, ""}; }
  static ItemResult Fail(ErrorCode code, std::string message) {
    return {std::nullopt, code, std::move(message)};
  }
};

struct QePair {
  std::string src;
  std::string mt;
};

class TranslationProvider {
 public:
  virtual ~TranslationProvider() = default;
  virtual std::string Id() const = 0;
  virtual std::vector<std::string> Translate(const std::vector<std::string>& texts,
                                             const std::string& source_lang,
                                             const std::string& target_lang) = 0;
};

class QeProvider {
 public:
  virtual ~QeProvider() = default;
  virtual std::string Id() const = 0;
  virtual std::vector<double> Estimate(const std::vector<QePair>& pairs,
                                       const std::string& target_lang) = 0;
};

class ScoringProvider {
 public:
  virtual ~ScoringProvider() = default;
  virtual std::string Id() const = 0;
  virtual std::vector<TokenLogprobs> Score(const std::vector<std::string>& texts,
                                           const ModelRef& model) = 0;
  // Identity and first-token conditioning, recorded in score provenance.
  virtual nlohmann::json Describe() = 0;
};

// Content-addressed response cache. With a directory it is persisted as one
// JSON-lines file per service kind; without one it lives in memory only.
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> dir = std::nullopt);

  static std::string Key(std::string_view kind, std::string_view provider,
                         const nlohmann::json& params, std::string_view text);

  std::optional<nlohmann::json> Get(const std::string& kind, const std::string& key) const;
  void Put(const std::string& kind, const std::string& key, const nlohmann::json& value);

  std::size_t Size() const;
  // Digest over the sorted contents; identical caches give identical digests.
  std::string Digest() const;

 private:
  void Load(const std::string& kind) const;

  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mu_;
  mutable std::map<std::string, std::map<std::string, nlohmann::json>> entries_;
  mutable std::map<std::string, bool> loaded_;
};

struct ClientOptions {
  std::size_t batch_size = 16;
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{200};
  double backoff_multiplier = 2.0;
  std::size_t max_inflight = 4;
};

class TranslationClient {
 public:
  TranslationClient(std::shared_ptr<TranslationProvider> provider,
                    std::shared_ptr<ResponseCache> cache, ClientOptions options = {});

  std::vector<ItemResult<std::string>> TranslateBatch(std::span<const std::string> texts,
                                                      const std::string& source_lang,
                                                      const std::string& target_lang);
  std::string ProviderId() const { return provider_->Id(); }
  std::size_t provider_calls() const { return calls_.load(); }

 private:
  std::shared_ptr<TranslationProvider> provider_;
  std::shared_ptr<ResponseCache> cache_;
  ClientOptions options_;
  std::atomic<std::size_t> calls_{0};
};

class QeClient {
 public:
  QeClient(std::shared_ptr<QeProvider> provider, std::shared_ptr<ResponseCache> cache,
           ClientOptions options = {});

  // Scores outside [0,1] are reported as kData item errors.
  std::vector<ItemResult<QeScore>> EstimateBatch(std::span<const QePair> pairs,
                                                 const std::string& target_lang);
  std::string ProviderId() const { return provider_->Id(); }
  std::size_t provider_calls() const { return calls_.load(); }

 private:
  std::shared_ptr<QeProvider> provider_;
  std::shared_ptr<ResponseCache> cache_;
  ClientOptions options_;
  std::atomic<std::size_t> calls_{0};
};

class ScoringClient {
 public:
  ScoringClient(std::shared_ptr<ScoringProvider> provider,
                std::shared_ptr<ResponseCache> cache, ClientOptions options = {});

  // Throws InvalidArgument for an empty text and ConfigError when the
  // endpoint cannot produce log-probabilities at all.
  std::vector<ItemResult<TokenLogprobs>> ScoreBatch(std::span<const std::string> texts,
                                                    const ModelRef& model);
  std::string ProviderId() const { return provider_->Id(); }
  nlohmann::json Describe() { return provider_->Describe(); }
  std::size_t provider_calls() const { return calls_.load(); }

 private:
  std::shared_ptr<ScoringProvider> provider_;
  std::shared_ptr<ResponseCache> cache_;
  ClientOptions options_;
  std::atomic<std::size_t> calls_{0};
};

// ---------------------------------------------------------------------------
// HTTP providers implementing the JSON wire protocol:
//   POST /translate {"source_lang","target_lang","texts"} -> {"translations"}
//   POST /qe        {"target_lang","pairs":[{"src","mt"}]} -> {"scores"}
//                   422 {"error":"unsupported_language"}
//   POST /score     {"model","texts"} -> {"results":[{"tokens","logprobs"}]}
//   GET  /meta      (scorer only, optional) -> {"conditioning": ...}

struct HttpEndpoint {
  std::string base_url;  // scheme://host[:port][/prefix]
  std::string api_key;   // sent as a bearer token when non-empty
  std::string provider_id;  // cache namespace; defaults to base_url
  int timeout_seconds = 120;
};

std::shared_ptr<TranslationProvider> MakeHttpTranslationProvider(HttpEndpoint endpoint);
std::shared_ptr<QeProvider> MakeHttpQeProvider(HttpEndpoint endpoint);
std::shared_ptr<ScoringProvider> MakeHttpScoringProvider(HttpEndpoint endpoint);

// ---------------------------------------------------------------------------
// Deterministic in-process fixtures for tests and offline runs.

struct FixtureTranslatorOptions {
  // "echo": returns the input unchanged.
  // "gender-suffix": inside the quoted span of a templated input, appends
  //   `masc_suffix` or `fem_suffix` depending on which marker it contains.
  // "mixed": per sentence, deterministically one of echo, gender-suffix,
  //   an extra feminine word (too different), or quotes stripped.
  std::string behavior = "echo";
  std::string masc_marker = "The man said";
  std::string fem_marker = "The woman said";
  std::string masc_suffix = "o";
  std::string fem_suffix = "a";
  std::vector<std::string> failing_texts;  // always raise kBackend
};

struct FixtureQeOptions {
  // 1.0 when mt == src, 0.0 for an empty mt, `default_score` otherwise.
  double default_score = 0.9;
  std::vector<std::string> unsupported_languages;
};

struct FixtureScorerOptions {
  std::string tokenization = "words";  // "words" (leading space kept) or "chars"
  std::string logprob = "hash";        // "hash" or "constant"
  double constant = -1.0;
  std::size_t max_tokens = 0;  // 0 = unlimited; longer texts are refused
  bool refuse_logprobs = false;  // simulate an endpoint without logprobs
};

std::shared_ptr<TranslationProvider> MakeFixtureTranslationProvider(
    FixtureTranslatorOptions options = {});
std::shared_ptr<QeProvider> MakeFixtureQeProvider(FixtureQeOptions options = {});
std::shared_ptr<ScoringProvider> MakeFixtureScoringProvider(FixtureScorerOptions options = {});

// Fixture tokenization, exposed for tests: concatenating the pieces gives
// back the text.
std::vector<std::string> FixtureTokenize(std::string_view text, std::string_view mode);

// Builders from a JSON backend description {"kind": "http"|"fixture", ...}.
std::shared_ptr<TranslationProvider> MakeTranslationProvider(const nlohmann::json& spec);
std::shared_ptr<QeProvider> MakeQeProvider(const nlohmann::json& spec);
std::shared_ptr<ScoringProvider> MakeScoringProvider(const nlohmann::json& spec);
ClientOptions ClientOptionsFromJson(const nlohmann::json& spec, std::size_t max_inflight);

}  // namespace stereoeval
