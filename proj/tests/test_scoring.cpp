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

#include <cmath>
#include <random>

#include "stereoeval/error.hpp"
#include "stereoeval/scoring.hpp"

using namespace stereoeval;

namespace {

DatasetEntry Gendered(const std::string& id, int stereotype) {
  DatasetEntry e;
  e.entry_id = id;
  e.source_id = id;
  e.lang = "sk";
  e.kind = EntryKind::kGendered;
  e.masc_text = "Som unavený.";
  e.fem_text = "Som unavená.";
  e.stereotype_id = stereotype;
  return e;
}

DatasetEntry Neutral(const std::string& id, const std::string& lang, int stereotype) {
  DatasetEntry e;
  e.entry_id = id;
  e.source_id = id;
  e.lang = lang;
  e.kind = EntryKind::kNeutral;
  e.masc_text = e.fem_text = "I cook every day.";
  e.stereotype_id = stereotype;
  return e;
}

ScoringClient FixtureClient(FixtureScorerOptions o = {}) {
  ClientOptions c;
  c.initial_backoff = std::chrono::milliseconds(0);
  return ScoringClient(MakeFixtureScoringProvider(std::move(o)), std::make_shared<ResponseCache>(), c);
}

}  // namespace

TEST_CASE("average log-likelihood") {
  CHECK(AverageLogLikelihood({{"a", "b"}, {-1.0, -3.0}}) == -2.0);
  CHECK_THROWS_AS(AverageLogLikelihood({}), Error);
}

TEST_CASE("relative masculine likelihood") {
  CHECK(RelativeMasculineLikelihood(-1.0, -1.0) == 0.5);
  CHECK(RelativeMasculineLikelihood(0.0, -std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(RelativeMasculineLikelihood(-800.0, 0.0) >= 0.0);
  CHECK(RelativeMasculineLikelihood(0.0, -800.0) <= 1.0);
  CHECK_THROWS_AS(RelativeMasculineLikelihood(NAN, 0.0), Error);
  CHECK_THROWS_AS(RelativeMasculineLikelihood(0.0, -INFINITY), Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ll(-12.0, 0.0);
  for (int i = 0; i < 100000; ++i) {
    const double a = ll(rng), b = ll(rng);
    const double r = RelativeMasculineLikelihood(a, b);
    REQUIRE(RelativeMasculineLikelihood(b, a) == 1.0 - r);
    REQUIRE(r == doctest::Approx(1.0 / (1.0 + std::exp(b - a))).epsilon(1e-12));
  }
}

TEST_CASE("scoring texts") {
  const auto& profiles = ProfileRegistry::Builtin();
  const auto& sk = profiles.Get("sk");
  const auto g = Gendered("g", 1);
  CHECK(ScoringTexts(g, TemplateMode::kGenderedPair, sk) ==
        std::pair<std::string, std::string>{"Som unavený.", "Som unavená."});
  CHECK_THROWS_AS(ScoringTexts(g, TemplateMode::kNoun, sk), Error);

  const auto n = Neutral("n", "en", 1);
  const auto& en = profiles.Get("en");
  CHECK(ScoringTexts(n, TemplateMode::kPronoun, en) ==
        std::pair<std::string, std::string>{"\"I cook every day.,\" he said",
                                            "\"I cook every day.,\" she said"});
  CHECK_THROWS_AS(ScoringTexts(n, TemplateMode::kGenderedPair, en), Error);
}

TEST_CASE("score entries in auto and explicit modes") {
  const auto& sk = ProfileRegistry::Builtin().Get("sk");
  std::vector<DatasetEntry> entries = {Gendered("g1", 1), Neutral("n1", "sk", 2),
                                       Gendered("g2", 9)};
  auto client = FixtureClient();
  const ModelRef model{"m", "", {}};

  const auto all = ScoreEntries(entries, model, std::nullopt, sk, client);
  REQUIRE(all.scores.size() == 3);
  CHECK(all.scores[0].template_mode == TemplateMode::kGenderedPair);
  CHECK(all.scores[1].template_mode == SelectTemplateMode(sk));
  CHECK(all.scores[2].stereotype_id == 9);
  for (const auto& s : all.scores) {
    CHECK(s.r_masc == RelativeMasculineLikelihood(s.ll_masc, s.ll_fem));
    CHECK(s.tokens_masc > 0);
  }

  const auto pairs = ScoreEntries(entries, model, TemplateMode::kGenderedPair, sk, client);
  CHECK(pairs.scores.size() == 2);
  const auto noun = ScoreEntries(entries, model, TemplateMode::kNoun, sk, client);
  REQUIRE(noun.scores.size() == 1);
  CHECK(noun.scores[0].entry_id == "n1");

  // Equal texts under a constant scorer give exactly one half.
  FixtureScorerOptions flat;
  flat.logprob = "constant";
  auto constant = FixtureClient(flat);
  const auto c = ScoreEntries(std::span(&entries[0], 1), model, std::nullopt, sk, constant);
  CHECK(c.scores[0].r_masc == 0.5);
}

TEST_CASE("pronoun mode is refused without pronoun templates") {
  const auto& fi = ProfileRegistry::Builtin().Get("fi");
  std::vector<DatasetEntry> entries = {Neutral("n", "fi", 1)};
  auto client = FixtureClient();
  try {
    ScoreEntries(entries, {"m", "", {}}, TemplateMode::kPronoun, fi, client);
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
  }
  const auto run = ScoreEntries(entries, {"m", "", {}}, std::nullopt, fi, client);
  REQUIRE(run.scores.size() == 1);
  CHECK(run.scores[0].template_mode == TemplateMode::kNoun);
}

TEST_CASE("entries the backend cannot score are skipped") {
  const auto& sk = ProfileRegistry::Builtin().Get("sk");
  FixtureScorerOptions limited;
  limited.max_tokens = 2;
  auto client = FixtureClient(limited);
  std::vector<DatasetEntry> entries = {Gendered("g", 1), Neutral("n", "sk", 2)};
  const auto run = ScoreEntries(entries, {"m", "", {}}, std::nullopt, sk, client);
  CHECK(run.scores.size() == 1);
  REQUIRE(run.skipped.size() == 1);
  CHECK(run.skipped[0].entry_id == "n");
}

TEST_CASE("score records round-trip") {
  const auto& sk = ProfileRegistry::Builtin().Get("sk");
  std::vector<DatasetEntry> entries = {Gendered("g", 1), Neutral("n", "sk", 2)};
  auto client = FixtureClient();
  const auto run = ScoreEntries(entries, {"m", "", {}}, std::nullopt, sk, client);
  CHECK(ParseScores(SerializeScores(run.scores)) == run.scores);
  CHECK_THROWS_AS(ParseScores("{\"entry_id\": \"x\"}\n"), Error);
  CHECK_THROWS_AS(ParseScores("not json\n"), Error);
}
