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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include "oracles.hpp"
#include "stereoeval/backends.hpp"
#include "stereoeval/util.hpp"

using namespace stereoeval;
using nlohmann::json;

namespace {

ClientOptions Fast(std::size_t batch = 4, std::size_t inflight = 1) {
  ClientOptions o;
  o.batch_size = batch;
  o.max_attempts = 3;
  o.initial_backoff = std::chrono::milliseconds(0);
  o.max_inflight = inflight;
  return o;
}

// Upper-cases input; can fail transiently or on a poison text.
class ScriptedTranslator : public TranslationProvider {
 public:
  std::string Id() const override { return "scripted"; }
  std::vector<std::string> Translate(const std::vector<std::string>& texts, const std::string&,
                                     const std::string&) override {
    std::lock_guard lock(mu);
    batches.push_back(texts);
    if (transient_failures > 0) {
      --transient_failures;
      throw BackendError("temporarily unavailable");
    }
    std::vector<std::string> out;
    for (const auto& t : texts) {
      if (t == poison) throw BackendError("cannot translate poison");
      std::string u = t;
      for (char& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      out.push_back(u);
    }
    if (drop_last && !out.empty()) out.pop_back();
    return out;
  }

  std::mutex mu;
  std::vector<std::vector<std::string>> batches;
  int transient_failures = 0;
  std::string poison = "\x01";
  bool drop_last = false;
};

class ScriptedQe : public QeProvider {
 public:
  std::string Id() const override { return "scripted-qe"; }
  std::vector<double> Estimate(const std::vector<QePair>& pairs, const std::string&) override {
    std::vector<double> out;
    for (const auto& p : pairs) out.push_back(p.mt == "bad" ? 1.5 : 0.5);
    return out;
  }
};

class TruncatingScorer : public ScoringProvider {
 public:
  std::string Id() const override { return "truncating"; }
  std::vector<TokenLogprobs> Score(const std::vector<std::string>& texts,
                                   const ModelRef&) override {
    std::vector<TokenLogprobs> out;
    for (const auto& t : texts) {
      auto tokens = FixtureTokenize(t, "words");
      if (tokens.size() > 2) tokens.resize(2);
      out.push_back({tokens, std::vector<double>(tokens.size(), -1.0)});
    }
    return out;
  }
  json Describe() override { return json::object(); }
};

}  // namespace

TEST_CASE("cache keys") {
  const auto k = ResponseCache::Key("translate", "p", {{"a", 1}}, "text");
  CHECK(k == ResponseCache::Key("translate", "p", {{"a", 1}}, "text"));
  CHECK(k != ResponseCache::Key("translate", "p", {{"a", 2}}, "text"));
  CHECK(k != ResponseCache::Key("qe", "p", {{"a", 1}}, "text"));
  CHECK(k != ResponseCache::Key("translate", "q", {{"a", 1}}, "text"));
  CHECK(k.size() == 64);
}

TEST_CASE("cache persistence") {
  oracle::TempDir dir;
  {
    ResponseCache cache(dir.path());
    cache.Put("translate", "k1", "v1");
    cache.Put("translate", "k1", "v1");
    cache.Put("qe", "k2", 0.5);
    CHECK(cache.Size() == 2);
  }
  // A torn trailing line is ignored.
  {
    std::ofstream out(dir.path() / "translate.jsonl", std::ios::app);
    out << "{\"k\": \"k3\", \"v\"";
  }
  ResponseCache reloaded(dir.path());
  CHECK(reloaded.Get("translate", "k1") == json("v1"));
  CHECK(reloaded.Get("qe", "k2") == json(0.5));
  CHECK_FALSE(reloaded.Get("translate", "k3"));
  CHECK(reloaded.Size() == 2);

  ResponseCache memory;
  memory.Put("translate", "k1", "v1");
  memory.Put("qe", "k2", 0.5);
  CHECK(memory.Digest() == reloaded.Digest());
}

TEST_CASE("batching, dedupe and cache hits") {
  auto provider = std::make_shared<ScriptedTranslator>();
  auto cache = std::make_shared<ResponseCache>();
  TranslationClient client(provider, cache, Fast(2));
  const std::vector<std::string> texts = {"a", "b", "a", "c", "b"};
  const auto r = client.TranslateBatch(texts, "en", "sk");
  REQUIRE(r.size() == 5);
  CHECK(*r[0].value == "A");
  CHECK(*r[2].value == "A");
  CHECK(*r[4].value == "B");
  CHECK(provider->batches.size() == 2);  // {a, b}, {c}
  CHECK(client.provider_calls() == 2);

  const auto again = client.TranslateBatch(texts, "en", "sk");
  CHECK(client.provider_calls() == 2);
  CHECK(*again[3].value == "C");

  // Different language pair is a different cache entry.
  client.TranslateBatch(std::vector<std::string>{"a"}, "en", "de");
  CHECK(client.provider_calls() == 3);
}

TEST_CASE("retry with backoff on transient failures") {
  auto provider = std::make_shared<ScriptedTranslator>();
  provider->transient_failures = 2;
  TranslationClient client(provider, std::make_shared<ResponseCache>(), Fast(8));
  const auto r = client.TranslateBatch(std::vector<std::string>{"x", "y"}, "en", "sk");
  CHECK(r[0].ok());
  CHECK(r[1].ok());
  CHECK(client.provider_calls() == 3);
}

TEST_CASE("failed batches are split to isolate bad items") {
  auto provider = std::make_shared<ScriptedTranslator>();
  provider->poison = "bad";
  TranslationClient client(provider, std::make_shared<ResponseCache>(), Fast(8));
  const auto r = client.TranslateBatch(std::vector<std::string>{"ok", "bad", "fine"}, "en", "sk");
  CHECK(r[0].ok());
  CHECK_FALSE(r[1].ok());
  CHECK(r[1].error_code == ErrorCode::kBackend);
  CHECK(r[2].ok());
}

TEST_CASE("length mismatch from the provider is split as well") {
  auto provider = std::make_shared<ScriptedTranslator>();
  provider->drop_last = true;
  TranslationClient client(provider, std::make_shared<ResponseCache>(), Fast(8));
  const auto r = client.TranslateBatch(std::vector<std::string>{"a", "b"}, "en", "sk");
  // Every single-item call also drops its only result.
  CHECK_FALSE(r[0].ok());
  CHECK(r[0].error_code == ErrorCode::kData);
}

TEST_CASE("concurrent batches keep input order") {
  auto provider = std::make_shared<ScriptedTranslator>();
  TranslationClient client(provider, std::make_shared<ResponseCache>(), Fast(3, 4));
  std::vector<std::string> texts;
  for (int i = 0; i < 100; ++i) texts.push_back("t" + std::to_string(i));
  const auto r = client.TranslateBatch(texts, "en", "sk");
  for (int i = 0; i < 100; ++i) CHECK(*r[i].value == "T" + std::to_string(i));
}

TEST_CASE("persisted cache is identical regardless of concurrency") {
  std::vector<std::string> texts;
  for (int i = 0; i < 40; ++i) texts.push_back("s" + std::to_string(i));
  std::string files[2];
  for (int run = 0; run < 2; ++run) {
    oracle::TempDir dir;
    TranslationClient client(std::make_shared<ScriptedTranslator>(),
                             std::make_shared<ResponseCache>(dir.path()), Fast(3, run ? 4 : 1));
    client.TranslateBatch(texts, "en", "sk");
    files[run] = ReadFile(dir.path() / "translate.jsonl");
  }
  CHECK(files[0] == files[1]);
}

TEST_CASE("QE scores outside [0,1] are item errors and not cached") {
  auto cache = std::make_shared<ResponseCache>();
  QeClient qe(std::make_shared<ScriptedQe>(), cache, Fast());
  const std::vector<QePair> pairs = {{"s", "good"}, {"s", "bad"}};
  const auto r = qe.EstimateBatch(pairs, "sk");
  CHECK(r[0].value->value == 0.5);
  CHECK_FALSE(r[1].ok());
  CHECK(r[1].error_code == ErrorCode::kData);
  CHECK(cache->Size() == 1);
}

TEST_CASE("fixture QE") {
  auto qe = MakeFixtureQeProvider({0.3, {"mt"}});
  const auto s = qe->Estimate({{"a", "a"}, {"a", ""}, {"a", "b"}}, "sk");
  CHECK(s == std::vector<double>{1.0, 0.0, 0.3});
  try {
    qe->Estimate({{"a", "b"}}, "mt");
    FAIL("expected unsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupported);
  }
}

TEST_CASE("fixture translator behaviors") {
  const std::string m = "The man said \"I am tired.\"";
  const std::string f = "The woman said \"I am tired.\"";
  auto echo = MakeFixtureTranslationProvider();
  CHECK(echo->Translate({m}, "en", "sk")[0] == m);
  FixtureTranslatorOptions o;
  o.behavior = "gender-suffix";
  auto suffix = MakeFixtureTranslationProvider(o);
  const auto out = suffix->Translate({m, f, "plain"}, "en", "sk");
  CHECK(out[0] == "The man said \"I am tired.o\"");
  CHECK(out[1] == "The woman said \"I am tired.a\"");
  CHECK(out[2] == "plain");
  o.behavior = "bogus";
  CHECK_THROWS_AS(MakeFixtureTranslationProvider(o), Error);
}

TEST_CASE("fixture scorer") {
  CHECK(FixtureTokenize("I am  here", "words") == std::vector<std::string>{"I", " am", "  here"});
  CHECK(FixtureTokenize("ýa", "chars") == std::vector<std::string>{"ý", "a"});
  auto scorer = MakeFixtureScoringProvider();
  const auto a = scorer->Score({"I am here"}, {"m1", "", {}});
  const auto b = scorer->Score({"I am here"}, {"m1", "", {}});
  const auto c = scorer->Score({"I am here"}, {"m2", "", {}});
  CHECK(a == b);
  CHECK(a[0].logprobs != c[0].logprobs);
  for (double lp : a[0].logprobs) {
    CHECK(lp <= -0.25);
    CHECK(lp > -4.25);
  }
  FixtureScorerOptions refuse;
  refuse.refuse_logprobs = true;
  ScoringClient client(MakeFixtureScoringProvider(refuse), nullptr, Fast());
  try {
    client.ScoreBatch(std::vector<std::string>{"x"}, {"m", "", {}});
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
  }
}

TEST_CASE("scoring client checks inputs and truncation") {
  ScoringClient client(std::make_shared<TruncatingScorer>(), std::make_shared<ResponseCache>(),
                       Fast());
  CHECK_THROWS_AS(client.ScoreBatch(std::vector<std::string>{""}, {"m", "", {}}), Error);
  const auto r = client.ScoreBatch(std::vector<std::string>{"one two", "one two three"},
                                   {"m", "", {}});
  CHECK(r[0].ok());
  CHECK_FALSE(r[1].ok());
  CHECK(r[1].error.find("truncated") != std::string::npos);

  FixtureScorerOptions limited;
  limited.max_tokens = 2;
  ScoringClient lim(MakeFixtureScoringProvider(limited), nullptr, Fast());
  const auto l = lim.ScoreBatch(std::vector<std::string>{"a b", "a b c"}, {"m", "", {}});
  CHECK(l[0].ok());
  CHECK_FALSE(l[1].ok());
  CHECK(l[1].error_code == ErrorCode::kData);
}

TEST_CASE("backend specs") {
  CHECK(MakeTranslationProvider({{"kind", "fixture"}, {"behavior", "mixed"}})->Id() ==
        "fixture-translate:mixed");
  CHECK_THROWS_AS(MakeTranslationProvider({{"kind", "smoke"}}), Error);
  CHECK_THROWS_AS(MakeQeProvider({{"kind", "http"}}), Error);  // no endpoint
  CHECK_THROWS_AS(MakeScoringProvider({{"kind", "http"}, {"endpoint", "localhost"}})
                      ->Score({"x"}, {"m", "", {}}),
                  Error);
  const auto o = ClientOptionsFromJson({{"batch_size", 5}, {"backoff_ms", 10}}, 3);
  CHECK(o.batch_size == 5);
  CHECK(o.initial_backoff.count() == 10);
  CHECK(o.max_inflight == 3);
  CHECK_THROWS_AS(ClientOptionsFromJson({{"batch_size", 0}}, 1), Error);
}

// ---------------------------------------------------------------------------
// HTTP protocol against an in-process server.

namespace {

class TestServer {
 public:
  TestServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

TEST_CASE("http translate and qe") {
  TestServer srv;
  std::atomic<int> unauthorized{0};
  std::atomic<int> flaky{1};
  srv.server().Post("/v1/translate", [&](const httplib::Request& req, httplib::Response& res) {
    if (req.get_header_value("Authorization") != "Bearer secret") ++unauthorized;
    if (flaky-- > 0) return Reply(res, 503, {{"error", "busy"}});
    const auto body = json::parse(req.body);
    json out = json::array();
    for (const auto& t : body.at("texts")) {
      out.push_back(body.at("target_lang").get<std::string>() + ":" + t.get<std::string>());
    }
    Reply(res, 200, {{"translations", out}});
  });
  srv.server().Post("/v1/qe", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    if (body.at("target_lang") == "mt") return Reply(res, 422, {{"error", "unsupported_language"}});
    json scores = json::array();
    for (const auto& p : body.at("pairs")) scores.push_back(p.at("mt") == p.at("src") ? 1.0 : 0.7);
    Reply(res, 200, {{"scores", scores}});
  });

  HttpEndpoint ep{srv.url() + "/v1/", "secret", "", 5};
  TranslationClient tr(MakeHttpTranslationProvider(ep), nullptr, Fast());
  const auto t = tr.TranslateBatch(std::vector<std::string>{"hello", "world"}, "en", "sk");
  CHECK(*t[0].value == "sk:hello");
  CHECK(*t[1].value == "sk:world");
  CHECK(tr.provider_calls() == 2);  // one 503 then success
  CHECK(unauthorized == 0);

  QeClient qe(MakeHttpQeProvider(ep), nullptr, Fast());
  const std::vector<QePair> pairs = {{"a", "a"}, {"a", "b"}};
  const auto q = qe.EstimateBatch(pairs, "sk");
  CHECK(q[0].value->value == 1.0);
  CHECK(q[1].value->value == 0.7);
  const auto u = qe.EstimateBatch(pairs, "mt");
  CHECK(u[0].error_code == ErrorCode::kUnsupported);
}

TEST_CASE("http score and meta") {
  TestServer srv;
  srv.server().Post("/score", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    if (body.at("model") == "no-logprobs") return Reply(res, 501, {{"error", "logprobs_unavailable"}});
    json results = json::array();
    for (const auto& t : body.at("texts")) {
      const auto text = t.get<std::string>();
      if (text.size() > 20) return Reply(res, 413, {{"error", "too_long"}});
      const auto tokens = FixtureTokenize(text, "words");
      results.push_back({{"tokens", tokens}, {"logprobs", std::vector<double>(tokens.size(), -0.5)}});
    }
    Reply(res, 200, {{"results", results}});
  });
  srv.server().Get("/meta", [](const httplib::Request&, httplib::Response& res) {
    Reply(res, 200, {{"model", "tiny"}, {"conditioning", "bos"}});
  });

  HttpEndpoint ep{srv.url(), "", "shim", 5};
  ScoringClient sc(MakeHttpScoringProvider(ep), nullptr, Fast());
  const auto r = sc.ScoreBatch(std::vector<std::string>{"I am here", "this text is far too long"},
                               {"tiny", "", {}});
  REQUIRE(r[0].ok());
  CHECK(r[0].value->tokens.size() == 3);
  CHECK_FALSE(r[1].ok());
  CHECK(r[1].error_code == ErrorCode::kData);
  const auto meta = sc.Describe();
  CHECK(meta["conditioning"] == "bos");
  CHECK(meta["provider"] == "shim");

  try {
    sc.ScoreBatch(std::vector<std::string>{"x"}, {"no-logprobs", "", {}});
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
  }
}

TEST_CASE("unreachable http endpoint fails items after retries") {
  HttpEndpoint ep{"http://127.0.0.1:1", "", "", 1};
  TranslationClient tr(MakeHttpTranslationProvider(ep), nullptr, Fast());
  const auto r = tr.TranslateBatch(std::vector<std::string>{"x"}, "en", "sk");
  CHECK_FALSE(r[0].ok());
  CHECK(r[0].error_code == ErrorCode::kBackend);
  CHECK(tr.provider_calls() == 3);
}
