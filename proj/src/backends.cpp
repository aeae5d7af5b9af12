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

#include "stereoeval/backends.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <thread>

#include "stereoeval/util.hpp"

namespace stereoeval {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Batch engine shared by the three clients.

using FetchFn = std::function<std::vector<json>(const std::vector<std::size_t>&)>;
using ValidateFn = std::function<std::optional<std::string>(std::size_t, const json&)>;

std::vector<json> CallWithRetry(const std::vector<std::size_t>& items, const FetchFn& fetch,
                                const ClientOptions& options,
                                std::atomic<std::size_t>& calls) {
  auto delay = options.initial_backoff;
  const int attempts = std::max(1, options.max_attempts);
  for (int attempt = 1;; ++attempt) {
    try {
      ++calls;
      std::vector<json> values = fetch(items);
      if (values.size() != items.size()) {
        throw DataError("backend returned " + std::to_string(values.size()) +
                        " results for " + std::to_string(items.size()) + " inputs");
      }
      return values;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBackend || attempt >= attempts) throw;
    } catch (const std::exception& e) {
      if (attempt >= attempts) throw BackendError(e.what());
    }
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    delay = std::chrono::milliseconds(
        static_cast<long long>(static_cast<double>(delay.count()) * options.backoff_multiplier));
  }
}

std::vector<ItemResult<json>> RunRequests(const std::vector<std::string>& keys,
                                          const std::string& kind, ResponseCache* cache,
                                          const ClientOptions& options,
                                          std::atomic<std::size_t>& calls,
                                          const FetchFn& fetch, const ValidateFn& validate) {
  const std::size_t n = keys.size();
  std::vector<ItemResult<json>> results(n);
  std::map<std::string, std::vector<std::size_t>> waiting;
  std::vector<std::size_t> unique;
  for (std::size_t i = 0; i < n; ++i) {
    if (cache) {
      if (auto hit = cache->Get(kind, keys[i])) {
        results[i] = ItemResult<json>::Ok(std::move(*hit));
        continue;
      }
    }
    auto& slot = waiting[keys[i]];
    if (slot.empty()) unique.push_back(i);
    slot.push_back(i);
  }

  const std::size_t batch_size = std::max<std::size_t>(1, options.batch_size);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < unique.size(); start += batch_size) {
    const std::size_t end = std::min(unique.size(), start + batch_size);
    batches.emplace_back(unique.begin() + static_cast<std::ptrdiff_t>(start),
                         unique.begin() + static_cast<std::ptrdiff_t>(end));
  }

  std::vector<ItemResult<json>> fetched(n);  // indexed by item
  std::mutex fatal_mu;
  std::exception_ptr fatal;

  auto process = [&](const std::vector<std::size_t>& batch) {
    try {
      auto values = CallWithRetry(batch, fetch, options, calls);
      for (std::size_t k = 0; k < batch.size(); ++k) {
        fetched[batch[k]] = ItemResult<json>::Ok(std::move(values[k]));
      }
      return;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConfig) {
        std::lock_guard lock(fatal_mu);
        if (!fatal) fatal = std::current_exception();
        return;
      }
      const bool split = batch.size() > 1 && (e.code() == ErrorCode::kBackend ||
                                              e.code() == ErrorCode::kData);
      if (!split) {
        for (std::size_t i : batch) fetched[i] = ItemResult<json>::Fail(e.code(), e.what());
        return;
      }
    }
    for (std::size_t i : batch) {
      try {
        auto values = CallWithRetry({i}, fetch, options, calls);
        fetched[i] = ItemResult<json>::Ok(std::move(values[0]));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kConfig) {
          std::lock_guard lock(fatal_mu);
          if (!fatal) fatal = std::current_exception();
          return;
        }
        fetched[i] = ItemResult<json>::Fail(e.code(), e.what());
      }
    }
  };

  const std::size_t workers =
      std::min(batches.size(), std::max<std::size_t>(1, options.max_inflight));
  if (workers <= 1) {
    for (const auto& batch : batches) process(batch);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < batches.size(); b = next++) process(batches[b]);
      });
    }
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  // Sequential in input order so the persisted cache is deterministic.
  for (std::size_t i : unique) {
    ItemResult<json> r = std::move(fetched[i]);
    if (r.ok()) {
      if (auto problem = validate(i, *r.value)) {
        r = ItemResult<json>::Fail(ErrorCode::kData, *problem);
      } else if (cache) {
        cache->Put(kind, keys[i], *r.value);
      }
    }
    for (std::size_t j : waiting[keys[i]]) results[j] = r;
  }
  return results;
}

template <typename T, typename Decode>
std::vector<ItemResult<T>> DecodeAll(std::vector<ItemResult<json>> raw, Decode decode) {
  std::vector<ItemResult<T>> out;
  out.reserve(raw.size());
  for (auto& r : raw) {
    if (r.ok()) {
      out.push_back(ItemResult<T>::Ok(decode(*r.value)));
    } else {
      out.push_back(ItemResult<T>::Fail(r.error_code, r.error));
    }
  }
  return out;
}

json LogprobsToJson(const TokenLogprobs& tl) {
  return json{{"tokens", tl.tokens}, {"logprobs", tl.logprobs}};
}

TokenLogprobs LogprobsFromJson(const json& j) {
  TokenLogprobs tl;
  try {
    tl.tokens = j.at("tokens").get<std::vector<std::string>>();
    tl.logprobs = j.at("logprobs").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed scoring result: ") + e.what());
  }
  return tl;
}

std::string StripSpaces(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// HTTP

struct HttpTarget {
  std::string origin;  // scheme://host:port
  std::string prefix;  // path prefix without trailing slash
};

HttpTarget ParseBaseUrl(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint must be an absolute URL: '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  HttpTarget target;
  target.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) {
    target.prefix = url.substr(path_start);
    while (!target.prefix.empty() && target.prefix.back() == '/') target.prefix.pop_back();
  }
  return target;
}

struct HttpReply {
  int status = 0;
  json body;
};

class HttpChannel {
 public:
  explicit HttpChannel(HttpEndpoint endpoint)
      : endpoint_(std::move(endpoint)), target_(ParseBaseUrl(endpoint_.base_url)) {}

  HttpReply Post(const std::string& path, const json& body) const {
    auto client = MakeClient();
    auto res = client.Post(target_.prefix + path, Headers(), body.dump(),
                           "application/json; charset=utf-8");
    return Parse(res, path);
  }

  HttpReply Get(const std::string& path) const {
    auto client = MakeClient();
    auto res = client.Get(target_.prefix + path, Headers());
    return Parse(res, path);
  }

  const HttpEndpoint& endpoint() const { return endpoint_; }

 private:
  httplib::Client MakeClient() const {
    httplib::Client client(target_.origin);
    client.set_connection_timeout(std::min(endpoint_.timeout_seconds, 30), 0);
    client.set_read_timeout(endpoint_.timeout_seconds, 0);
    client.set_write_timeout(endpoint_.timeout_seconds, 0);
    return client;
  }

  httplib::Headers Headers() const {
    httplib::Headers headers;
    if (!endpoint_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
    }
    return headers;
  }

  HttpReply Parse(const httplib::Result& res, const std::string& path) const {
    if (!res) {
      throw BackendError(endpoint_.base_url + path + ": " + httplib::to_string(res.error()));
    }
    HttpReply reply;
    reply.status = res->status;
    reply.body = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    // 501 is a capability answer, left to the caller.
    if ((reply.status >= 500 && reply.status != 501) || reply.status == 429) {
      throw BackendError(endpoint_.base_url + path + ": HTTP " + std::to_string(reply.status));
    }
    return reply;
  }

  HttpEndpoint endpoint_;
  HttpTarget target_;
};

std::string ErrorField(const json& body) {
  if (body.is_object() && body.contains("error") && body["error"].is_string()) {
    return body["error"].get<std::string>();
  }
  return "";
}

class HttpTranslationProvider final : public TranslationProvider {
 public:
  explicit HttpTranslationProvider(HttpEndpoint endpoint) : channel_(std::move(endpoint)) {}

  std::string Id() const override { return channel_.endpoint().provider_id; }

  std::vector<std::string> Translate(const std::vector<std::string>& texts,
                                     const std::string& source_lang,
                                     const std::string& target_lang) override {
    const auto reply = channel_.Post(
        "/translate",
        json{{"source_lang", source_lang}, {"target_lang", target_lang}, {"texts", texts}});
    if (reply.status == 422 && ErrorField(reply.body) == "unsupported_language") {
      throw UnsupportedLanguage("translation backend does not support " + target_lang);
    }
    if (reply.status != 200) {
      throw DataError("/translate: HTTP " + std::to_string(reply.status) + " " +
                      ErrorField(reply.body));
    }
    try {
      return reply.body.at("translations").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw DataError(std::string("/translate: malformed response: ") + e.what());
    }
  }

 private:
  HttpChannel channel_;
};

class HttpQeProvider final : public QeProvider {
 public:
  explicit HttpQeProvider(HttpEndpoint endpoint) : channel_(std::move(endpoint)) {}

  std::string Id() const override { return channel_.endpoint().provider_id; }

  std::vector<double> Estimate(const std::vector<QePair>& pairs,
                               const std::string& target_lang) override {
    json wire = json::array();
    for (const auto& p : pairs) wire.push_back({{"src", p.src}, {"mt", p.mt}});
    const auto reply = channel_.Post("/qe", json{{"target_lang", target_lang}, {"pairs", wire}});
    if (reply.status == 422 && ErrorField(reply.body) == "unsupported_language") {
      throw UnsupportedLanguage("quality estimation does not support " + target_lang);
    }
    if (reply.status != 200) {
      throw DataError("/qe: HTTP " + std::to_string(reply.status) + " " + ErrorField(reply.body));
    }
    try {
      return reply.body.at("scores").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw DataError(std::string("/qe: malformed response: ") + e.what());
    }
  }

 private:
  HttpChannel channel_;
};

class HttpScoringProvider final : public ScoringProvider {
 public:
  explicit HttpScoringProvider(HttpEndpoint endpoint) : channel_(std::move(endpoint)) {}

  std::string Id() const override { return channel_.endpoint().provider_id; }

  std::vector<TokenLogprobs> Score(const std::vector<std::string>& texts,
                                   const ModelRef& model) override {
    const auto reply = channel_.Post("/score", json{{"model", model.model_id}, {"texts", texts}});
    const std::string error = ErrorField(reply.body);
    if (reply.status == 501 || error == "logprobs_unavailable" ||
        error == "logprobs_unsupported") {
      throw ConfigError("scoring endpoint " + channel_.endpoint().base_url +
                        " cannot return token log-probabilities");
    }
    if (reply.status == 413) throw DataError("/score: input too long (" + error + ")");
    if (reply.status != 200) {
      throw DataError("/score: HTTP " + std::to_string(reply.status) + " " + error);
    }
    std::vector<TokenLogprobs> out;
    if (!reply.body.is_object() || !reply.body.contains("results") ||
        !reply.body["results"].is_array()) {
      throw DataError("/score: malformed response");
    }
    for (const auto& r : reply.body["results"]) out.push_back(LogprobsFromJson(r));
    return out;
  }

  json Describe() override {
    std::lock_guard lock(mu_);
    if (!meta_) {
      json meta = {{"provider", Id()}, {"conditioning", "undeclared"}};
      try {
        const auto reply = channel_.Get("/meta");
        if (reply.status == 200 && reply.body.is_object()) {
          for (const auto& [k, v] : reply.body.items()) meta[k] = v;
          meta["provider"] = Id();
        }
      } catch (const Error&) {
        // /meta is optional.
      }
      meta_ = std::move(meta);
    }
    return *meta_;
  }

 private:
  HttpChannel channel_;
  std::mutex mu_;
  std::optional<json> meta_;
};

// ---------------------------------------------------------------------------
// Fixtures

class FixtureTranslationProvider final : public TranslationProvider {
 public:
  explicit FixtureTranslationProvider(FixtureTranslatorOptions options)
      : options_(std::move(options)) {
    if (options_.behavior != "echo" && options_.behavior != "gender-suffix" &&
        options_.behavior != "mixed") {
      throw ConfigError("unknown fixture translator behavior '" + options_.behavior + "'");
    }
  }

  std::string Id() const override { return "fixture-translate:" + options_.behavior; }

  std::vector<std::string> Translate(const std::vector<std::string>& texts,
                                     const std::string&, const std::string&) override {
    std::vector<std::string> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
      if (std::find(options_.failing_texts.begin(), options_.failing_texts.end(), text) !=
          options_.failing_texts.end()) {
        throw BackendError("fixture translator refuses '" + text + "'");
      }
      out.push_back(TranslateOne(text));
    }
    return out;
  }

 private:
  std::string TranslateOne(const std::string& text) const {
    if (options_.behavior == "echo") return text;
    const bool fem = text.find(options_.fem_marker) != std::string::npos;
    const bool masc = !fem && text.find(options_.masc_marker) != std::string::npos;
    const auto open = text.find('"');
    const auto close = text.rfind('"');
    if ((!fem && !masc) || open == std::string::npos || close <= open) return text;

    const std::string head = text.substr(0, open + 1);
    const std::string inner = text.substr(open + 1, close - open - 1);
    const std::string tail = text.substr(close);
    int style = 1;  // gender-suffix
    if (options_.behavior == "mixed") style = static_cast<int>(Fnv1a64(inner) % 4);
    switch (style) {
      case 0:
        return text;
      case 1:
        return head + inner + (fem ? options_.fem_suffix : options_.masc_suffix) + tail;
      case 2:
        return fem ? head + inner + " indeed" + tail : text;
      default:
        return text.substr(0, open) + inner + text.substr(close + 1);
    }
  }

  FixtureTranslatorOptions options_;
};

class FixtureQeProvider final : public QeProvider {
 public:
  explicit FixtureQeProvider(FixtureQeOptions options) : options_(std::move(options)) {}

  std::string Id() const override {
    return "fixture-qe:" + FormatDouble(options_.default_score);
  }

  std::vector<double> Estimate(const std::vector<QePair>& pairs,
                               const std::string& target_lang) override {
    const auto& unsupported = options_.unsupported_languages;
    if (std::find(unsupported.begin(), unsupported.end(), target_lang) != unsupported.end()) {
      throw UnsupportedLanguage("fixture QE does not support " + target_lang);
    }
    std::vector<double> scores;
    scores.reserve(pairs.size());
    for (const auto& p : pairs) {
      if (p.mt.empty()) scores.push_back(0.0);
      else if (p.mt == p.src) scores.push_back(1.0);
      else scores.push_back(options_.default_score);
    }
    return scores;
  }

 private:
  FixtureQeOptions options_;
};

class FixtureScoringProvider final : public ScoringProvider {
 public:
  explicit FixtureScoringProvider(FixtureScorerOptions options) : options_(std::move(options)) {
    if (options_.tokenization != "words" && options_.tokenization != "chars") {
      throw ConfigError("unknown fixture tokenization '" + options_.tokenization + "'");
    }
    if (options_.logprob != "hash" && options_.logprob != "constant") {
      throw ConfigError("unknown fixture logprob mode '" + options_.logprob + "'");
    }
    if (options_.logprob == "constant" && !(options_.constant <= 0.0)) {
      throw ConfigError("fixture constant logprob must be <= 0");
    }
  }

  std::string Id() const override {
    std::string id = "fixture-score:" + options_.tokenization + ":" + options_.logprob;
    if (options_.logprob == "constant") id += ":" + FormatDouble(options_.constant);
    return id;
  }

  std::vector<TokenLogprobs> Score(const std::vector<std::string>& texts,
                                   const ModelRef& model) override {
    if (options_.refuse_logprobs) {
      throw ConfigError("fixture scorer configured to refuse log-probabilities");
    }
    std::vector<TokenLogprobs> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
      TokenLogprobs tl;
      tl.tokens = FixtureTokenize(text, options_.tokenization);
      if (options_.max_tokens > 0 && tl.tokens.size() > options_.max_tokens) {
        throw DataError("input exceeds " + std::to_string(options_.max_tokens) + " tokens");
      }
      for (const auto& token : tl.tokens) {
        if (options_.logprob == "constant") {
          tl.logprobs.push_back(options_.constant);
        } else {
          const auto h = Fnv1a64(model.model_id + '\x1f' + token);
          tl.logprobs.push_back(-(0.25 + static_cast<double>(h % 4096) / 1024.0));
        }
      }
      out.push_back(std::move(tl));
    }
    return out;
  }

  json Describe() override {
    return json{{"provider", Id()}, {"conditioning", "none: first token scored unconditioned"}};
  }

 private:
  FixtureScorerOptions options_;
};

HttpEndpoint EndpointFromJson(const json& spec) {
  HttpEndpoint ep;
  ep.base_url = spec.value("endpoint", std::string());
  if (ep.base_url.empty()) throw ConfigError("http backend requires 'endpoint'");
  ep.api_key = spec.value("api_key", std::string());
  ep.provider_id = spec.value("provider", ep.base_url);
  ep.timeout_seconds = spec.value("timeout_s", 120);
  return ep;
}

std::string KindOf(const json& spec) {
  if (!spec.is_object()) throw ConfigError("backend description must be an object");
  return spec.value("kind", std::string("fixture"));
}

}  // namespace

void ValidateTokenLogprobs(const TokenLogprobs& tl) {
  if (tl.tokens.size() != tl.logprobs.size()) {
    throw DataError("token/logprob length mismatch");
  }
  if (tl.tokens.empty()) throw DataError("no tokens scored");
  for (double lp : tl.logprobs) {
    if (!std::isfinite(lp) || lp > 0.0) {
      throw DataError("logprob out of range: " + FormatDouble(lp));
    }
  }
}

// ---------------------------------------------------------------------------
// ResponseCache

ResponseCache::ResponseCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (dir_) {
    std::error_code ec;
    std::filesystem::create_directories(*dir_, ec);
    if (ec) throw IoError("cannot create cache directory " + dir_->string());
  }
}

std::string ResponseCache::Key(std::string_view kind, std::string_view provider,
                               const json& params, std::string_view text) {
  const json material = json::array(
      {std::string(kind), std::string(provider), params, std::string(text)});
  return Sha256Hex(material.dump());
}

void ResponseCache::Load(const std::string& kind) const {
  if (loaded_[kind]) return;
  loaded_[kind] = true;
  if (!dir_) return;
  const auto path = *dir_ / (kind + ".jsonl");
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  auto& bucket = entries_[kind];
  while (std::getline(in, line)) {
    // A torn final line from an interrupted run is skipped.
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object() || !record.contains("k")) continue;
    bucket[record["k"].get<std::string>()] = record["v"];
  }
}

std::optional<json> ResponseCache::Get(const std::string& kind, const std::string& key) const {
  std::lock_guard lock(mu_);
  Load(kind);
  auto bucket = entries_.find(kind);
  if (bucket == entries_.end()) return std::nullopt;
  auto it = bucket->second.find(key);
  if (it == bucket->second.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::Put(const std::string& kind, const std::string& key, const json& value) {
  std::lock_guard lock(mu_);
  Load(kind);
  auto [it, inserted] = entries_[kind].insert_or_assign(key, value);
  if (!dir_ || !inserted) return;
  std::ofstream out(*dir_ / (kind + ".jsonl"), std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to cache in " + dir_->string());
  out << json{{"k", key}, {"v", value}}.dump() << '\n';
}

std::size_t ResponseCache::Size() const {
  std::lock_guard lock(mu_);
  if (dir_) {
    for (const auto& item : std::filesystem::directory_iterator(*dir_)) {
      if (item.path().extension() == ".jsonl") Load(item.path().stem().string());
    }
  }
  std::size_t n = 0;
  for (const auto& [_, bucket] : entries_) n += bucket.size();
  return n;
}

std::string ResponseCache::Digest() const {
  Size();  // loads every persisted kind
  std::lock_guard lock(mu_);
  std::string material;
  for (const auto& [kind, bucket] : entries_) {
    for (const auto& [key, value] : bucket) {
      material += kind + '\t' + key + '\t' + value.dump() + '\n';
    }
  }
  return Sha256Hex(material);
}

// ---------------------------------------------------------------------------
// Clients

TranslationClient::TranslationClient(std::shared_ptr<TranslationProvider> provider,
                                     std::shared_ptr<ResponseCache> cache, ClientOptions options)
    : provider_(std::move(provider)), cache_(std::move(cache)), options_(options) {}

std::vector<ItemResult<std::string>> TranslationClient::TranslateBatch(
    std::span<const std::string> texts, const std::string& source_lang,
    const std::string& target_lang) {
  const std::string provider_id = provider_->Id();
  const json params = {{"source_lang", source_lang}, {"target_lang", target_lang}};
  std::vector<std::string> keys;
  keys.reserve(texts.size());
  for (const auto& t : texts) keys.push_back(ResponseCache::Key("translate", provider_id, params, t));

  auto fetch = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::string> batch;
    for (std::size_t i : idx) batch.push_back(texts[i]);
    std::vector<json> out;
    for (auto& t : provider_->Translate(batch, source_lang, target_lang)) out.emplace_back(std::move(t));
    return out;
  };
  auto validate = [](std::size_t, const json& v) -> std::optional<std::string> {
    if (!v.is_string()) return "translation is not a string";
    return std::nullopt;
  };
  auto raw = RunRequests(keys, "translate", cache_.get(), options_, calls_, fetch, validate);
  return DecodeAll<std::string>(std::move(raw), [](const json& v) { return v.get<std::string>(); });
}

QeClient::QeClient(std::shared_ptr<QeProvider> provider, std::shared_ptr<ResponseCache> cache,
                   ClientOptions options)
    : provider_(std::move(provider)), cache_(std::move(cache)), options_(options) {}

std::vector<ItemResult<QeScore>> QeClient::EstimateBatch(std::span<const QePair> pairs,
                                                         const std::string& target_lang) {
  const std::string provider_id = provider_->Id();
  const json params = {{"target_lang", target_lang}};
  std::vector<std::string> keys;
  keys.reserve(pairs.size());
  for (const auto& p : pairs) {
    keys.push_back(ResponseCache::Key("qe", provider_id, params, p.src + '\x1f' + p.mt));
  }
  auto fetch = [&](const std::vector<std::size_t>& idx) {
    std::vector<QePair> batch;
    for (std::size_t i : idx) batch.push_back(pairs[i]);
    std::vector<json> out;
    for (double s : provider_->Estimate(batch, target_lang)) out.emplace_back(s);
    return out;
  };
  auto validate = [](std::size_t, const json& v) -> std::optional<std::string> {
    if (!v.is_number()) return "QE score is not a number";
    const double s = v.get<double>();
    if (!(s >= 0.0 && s <= 1.0)) return "QE score outside [0,1]: " + FormatDouble(s);
    return std::nullopt;
  };
  auto raw = RunRequests(keys, "qe", cache_.get(), options_, calls_, fetch, validate);
  return DecodeAll<QeScore>(std::move(raw), [](const json& v) { return QeScore{v.get<double>()}; });
}

ScoringClient::ScoringClient(std::shared_ptr<ScoringProvider> provider,
                             std::shared_ptr<ResponseCache> cache, ClientOptions options)
    : provider_(std::move(provider)), cache_(std::move(cache)), options_(options) {}

std::vector<ItemResult<TokenLogprobs>> ScoringClient::ScoreBatch(std::span<const std::string> texts,
                                                                 const ModelRef& model) {
  if (model.model_id.empty()) throw InvalidArgument("ScoreBatch: empty model id");
  for (const auto& t : texts) {
    if (t.empty()) throw InvalidArgument("ScoreBatch: empty text");
  }
  const std::string provider_id = provider_->Id();
  const json params = {{"model", model.model_id}, {"params", model.params}};
  std::vector<std::string> keys;
  keys.reserve(texts.size());
  for (const auto& t : texts) keys.push_back(ResponseCache::Key("score", provider_id, params, t));

  auto fetch = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::string> batch;
    for (std::size_t i : idx) batch.push_back(texts[i]);
    std::vector<json> out;
    for (const auto& tl : provider_->Score(batch, model)) out.push_back(LogprobsToJson(tl));
    return out;
  };
  auto validate = [&](std::size_t i, const json& v) -> std::optional<std::string> {
    try {
      const TokenLogprobs tl = LogprobsFromJson(v);
      ValidateTokenLogprobs(tl);
      std::string joined;
      for (const auto& tok : tl.tokens) joined += tok;
      const std::string got = StripSpaces(joined);
      const std::string want = StripSpaces(texts[i]);
      if (got.size() < want.size() && want.starts_with(got)) {
        return "scored tokens cover only a prefix of the text (truncated)";
      }
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::nullopt;
  };
  auto raw = RunRequests(keys, "score", cache_.get(), options_, calls_, fetch, validate);
  return DecodeAll<TokenLogprobs>(std::move(raw), LogprobsFromJson);
}

// ---------------------------------------------------------------------------
// Factories

std::shared_ptr<TranslationProvider> MakeHttpTranslationProvider(HttpEndpoint endpoint) {
  if (endpoint.provider_id.empty()) endpoint.provider_id = endpoint.base_url;
  return std::make_shared<HttpTranslationProvider>(std::move(endpoint));
}

std::shared_ptr<QeProvider> MakeHttpQeProvider(HttpEndpoint endpoint) {
  if (endpoint.provider_id.empty()) endpoint.provider_id = endpoint.base_url;
  return std::make_shared<HttpQeProvider>(std::move(endpoint));
}

std::shared_ptr<ScoringProvider> MakeHttpScoringProvider(HttpEndpoint endpoint) {
  if (endpoint.provider_id.empty()) endpoint.provider_id = endpoint.base_url;
  return std::make_shared<HttpScoringProvider>(std::move(endpoint));
}

std::shared_ptr<TranslationProvider> MakeFixtureTranslationProvider(
    FixtureTranslatorOptions options) {
  return std::make_shared<FixtureTranslationProvider>(std::move(options));
}

std::shared_ptr<QeProvider> MakeFixtureQeProvider(FixtureQeOptions options) {
  return std::make_shared<FixtureQeProvider>(std::move(options));
}

std::shared_ptr<ScoringProvider> MakeFixtureScoringProvider(FixtureScorerOptions options) {
  return std::make_shared<FixtureScoringProvider>(std::move(options));
}

std::vector<std::string> FixtureTokenize(std::string_view text, std::string_view mode) {
  std::vector<std::string> pieces;
  if (mode == "chars") {
    std::size_t i = 0;
    while (i < text.size()) {
      const auto lead = static_cast<unsigned char>(text[i]);
      std::size_t len = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2 : (lead >> 4) == 0xE ? 3 : 4;
      len = std::min(len, text.size() - i);
      pieces.emplace_back(text.substr(i, len));
      i += len;
    }
    return pieces;
  }
  // Words: each piece is a run of whitespace followed by a run of non-space.
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = i;
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n')) ++i;
    while (i < text.size() && !(text[i] == ' ' || text[i] == '\t' || text[i] == '\n')) ++i;
    pieces.emplace_back(text.substr(start, i - start));
  }
  return pieces;
}

std::shared_ptr<TranslationProvider> MakeTranslationProvider(const json& spec) {
  const std::string kind = KindOf(spec);
  if (kind == "http") return MakeHttpTranslationProvider(EndpointFromJson(spec));
  if (kind != "fixture") throw ConfigError("unknown translation backend kind '" + kind + "'");
  FixtureTranslatorOptions o;
  o.behavior = spec.value("behavior", o.behavior);
  o.masc_marker = spec.value("masc_marker", o.masc_marker);
  o.fem_marker = spec.value("fem_marker", o.fem_marker);
  o.masc_suffix = spec.value("masc_suffix", o.masc_suffix);
  o.fem_suffix = spec.value("fem_suffix", o.fem_suffix);
  o.failing_texts = spec.value("failing_texts", o.failing_texts);
  return MakeFixtureTranslationProvider(std::move(o));
}

std::shared_ptr<QeProvider> MakeQeProvider(const json& spec) {
  const std::string kind = KindOf(spec);
  if (kind == "http") return MakeHttpQeProvider(EndpointFromJson(spec));
  if (kind != "fixture") throw ConfigError("unknown QE backend kind '" + kind + "'");
  FixtureQeOptions o;
  o.default_score = spec.value("default_score", o.default_score);
  o.unsupported_languages = spec.value("unsupported_languages", o.unsupported_languages);
  return MakeFixtureQeProvider(std::move(o));
}

std::shared_ptr<ScoringProvider> MakeScoringProvider(const json& spec) {
  const std::string kind = KindOf(spec);
  if (kind == "http") return MakeHttpScoringProvider(EndpointFromJson(spec));
  if (kind != "fixture") throw ConfigError("unknown scoring backend kind '" + kind + "'");
  FixtureScorerOptions o;
  o.tokenization = spec.value("tokenization", o.tokenization);
  o.logprob = spec.value("logprob", o.logprob);
  o.constant = spec.value("constant", o.constant);
  o.max_tokens = spec.value("max_tokens", o.max_tokens);
  o.refuse_logprobs = spec.value("refuse_logprobs", o.refuse_logprobs);
  return MakeFixtureScoringProvider(std::move(o));
}

ClientOptions ClientOptionsFromJson(const json& spec, std::size_t max_inflight) {
  ClientOptions o;
  o.max_inflight = max_inflight;
  if (!spec.is_object()) return o;
  o.batch_size = spec.value("batch_size", o.batch_size);
  o.max_attempts = spec.value("max_attempts", o.max_attempts);
  o.initial_backoff = std::chrono::milliseconds(
      spec.value("backoff_ms", static_cast<long long>(o.initial_backoff.count())));
  o.backoff_multiplier = spec.value("backoff_multiplier", o.backoff_multiplier);
  if (o.batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (o.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  return o;
}

}  // namespace stereoeval
