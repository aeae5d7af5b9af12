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

#include <random>

#include "oracles.hpp"
#include "stereoeval/error.hpp"
#include "stereoeval/expansion.hpp"

using namespace stereoeval;
using Outcome = PairClassification::Outcome;

namespace {

std::vector<SourceSentence> Corpus(std::size_t n) {
  static const char* kTexts[] = {"I am tired.", "I was late again.", "I cooked dinner.",
                                 "I fixed the car.", "I cried at the movie."};
  std::vector<SourceSentence> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"s" + std::to_string(i + 1),
                   std::string(kTexts[i % 5]) + " #" + std::to_string(i),
                   static_cast<int>(i % 16) + 1});
  }
  return out;
}

class ZeroQe : public QeProvider {
 public:
  std::string Id() const override { return "zero"; }
  std::vector<double> Estimate(const std::vector<QePair>& pairs, const std::string&) override {
    return std::vector<double>(pairs.size(), 0.0);
  }
};

struct Harness {
  explicit Harness(FixtureTranslatorOptions t = {}, FixtureQeOptions q = {})
      : Harness(std::move(t), MakeFixtureQeProvider(std::move(q))) {}
  Harness(FixtureTranslatorOptions t, std::shared_ptr<QeProvider> q)
      : translator(MakeFixtureTranslationProvider(std::move(t)), nullptr, Opts()),
        qe(std::move(q), nullptr, Opts()) {}

  static ClientOptions Opts() {
    ClientOptions o;
    o.initial_backoff = std::chrono::milliseconds(0);
    o.max_attempts = 1;
    return o;
  }

  ExpansionResult Run(std::span<const SourceSentence> corpus, const std::string& lang,
                      ExpansionOptions options = {}) {
    return ExpandLanguage(corpus, ProfileRegistry::Builtin().Get(lang), translator, qe, options);
  }

  TranslationClient translator;
  QeClient qe;
};

FixtureTranslatorOptions Behavior(const std::string& b) {
  FixtureTranslatorOptions o;
  o.behavior = b;
  return o;
}

oracle::Pair Expected(Outcome o) {
  switch (o) {
    case Outcome::kNeutral: return oracle::Pair::kNeutral;
    case Outcome::kGendered: return oracle::Pair::kGendered;
    default: return oracle::Pair::kDiscard;
  }
}

void CheckConservation(const ExpansionResult& r, std::span<const SourceSentence> corpus) {
  REQUIRE(r.entries.size() + r.discards.size() == corpus.size());
  std::multiset<std::string> seen;
  for (const auto& e : r.entries) seen.insert(e.source_id);
  for (const auto& d : r.discards) seen.insert(d.source_id);
  std::multiset<std::string> expected;
  for (const auto& s : corpus) expected.insert(s.id);
  CHECK(seen == expected);
  for (const auto& e : r.entries) CHECK_FALSE(ValidateEntry(e));
  const auto t = r.Tallies();
  CHECK(t["total"] == corpus.size());
}

}  // namespace

TEST_CASE("pair classification examples") {
  const PairHeuristicConfig cfg;
  CHECK(ClassifyPair("Som unavený.", "Som unavený.", cfg).outcome == Outcome::kNeutral);
  CHECK(ClassifyPair("Som emotívny.", "Som emotívna.", cfg).outcome == Outcome::kGendered);
  CHECK(ClassifyPair("Sono stanco di lavorare.", "Sono stanco di lavorare.", cfg).outcome ==
        Outcome::kNeutral);
  const auto g = ClassifyPair("Bol som unavený.", "Bola som unavená.", cfg);
  CHECK(g.outcome == Outcome::kDiscard);  // two words differ
  const auto one = ClassifyPair("Som unavený.", "Som unavená.", cfg);
  REQUIRE(one.outcome == Outcome::kGendered);
  CHECK(one.positions == std::vector<std::size_t>{1});
  CHECK(one.char_edits == std::vector<std::size_t>{1});
  CHECK(ClassifyPair("Ich bin Lehrer.", "Ich bin Lehrerin.", cfg).outcome == Outcome::kGendered);
  CHECK(ClassifyPair("Je suis acteur.", "Je suis actrice.", cfg).outcome == Outcome::kDiscard);
  CHECK(ClassifyPair("a b", "a b c", cfg).outcome == Outcome::kDiscard);

  PairHeuristicConfig two = cfg;
  two.max_differing_words = 2;
  CHECK(ClassifyPair("Bol som unavený.", "Bola som unavená.", two).outcome == Outcome::kGendered);
  CHECK_THROWS_AS(ClassifyPair("", "x", cfg), Error);
}

TEST_CASE("pair classification agrees with the oracle and is swap-symmetric") {
  const std::vector<std::string> vocab = {"som", "bol", "bola", "unavený", "unavená", "ja",
                                          "učiteľ", "učiteľka", "a", "ab", "abc", "x.", "že"};
  std::mt19937_64 rng(42);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t len = 1 + pick(5);
    std::string m, f;
    for (std::size_t i = 0; i < len; ++i) {
      const auto& w = vocab[pick(vocab.size())];
      const auto& v = pick(3) == 0 ? vocab[pick(vocab.size())] : w;
      m += (i ? " " : "") + w;
      f += (i ? " " : "") + v;
    }
    if (pick(10) == 0) f += " extra";
    PairHeuristicConfig cfg;
    cfg.max_differing_words = 1 + pick(2);
    cfg.max_char_edit = 1 + pick(3);
    const auto got = ClassifyPair(m, f, cfg);
    CHECK(Expected(got.outcome) ==
          oracle::Classify(m, f, cfg.max_differing_words, cfg.max_char_edit));
    CHECK(ClassifyPair(f, m, cfg).outcome == got.outcome);
  }
}

TEST_CASE("heuristic config validation") {
  PairHeuristicConfig cfg;
  cfg.qe_threshold = 1.5;
  CHECK_THROWS_AS(cfg.Validate(), Error);
  cfg.qe_threshold = 0.5;
  cfg.max_differing_words = 0;
  CHECK_THROWS_AS(cfg.Validate(), Error);
  CHECK(ParseUnsupportedQePolicy("skip-qe") == UnsupportedQePolicy::kSkipQe);
  CHECK_FALSE(ParseUnsupportedQePolicy("skip"));
  for (auto r : kAllDiscardReasons) CHECK(ParseDiscardReason(ToString(r)) == r);
}

TEST_CASE("templated language with gender suffixes") {
  const auto corpus = Corpus(20);
  Harness h(Behavior("gender-suffix"));
  const auto r = h.Run(corpus, "sk");
  CheckConservation(r, corpus);
  CHECK(r.CountKind(EntryKind::kGendered) == 20);
  const auto& e = r.entries.front();
  CHECK(e.masc_text == "I am tired. #0o");
  CHECK(e.fem_text == "I am tired. #0a");
  CHECK(e.provenance["path"] == "templated");
  CHECK(e.provenance["qe_masc"] == 0.9);
}

TEST_CASE("templated language with echo yields neutral entries") {
  const auto corpus = Corpus(10);
  Harness h;
  const auto r = h.Run(corpus, "de");
  CheckConservation(r, corpus);
  CHECK(r.CountKind(EntryKind::kNeutral) == 10);
  CHECK(r.entries[3].masc_text == corpus[3].text);
}

TEST_CASE("mixed translator exercises every outcome") {
  const auto corpus = Corpus(64);
  Harness h(Behavior("mixed"));
  const auto r = h.Run(corpus, "sk");
  CheckConservation(r, corpus);
  CHECK(r.CountKind(EntryKind::kNeutral) > 0);
  CHECK(r.CountKind(EntryKind::kGendered) > 0);
  CHECK(r.CountReason(DiscardReason::kPairTooDifferent) > 0);
  CHECK(r.CountReason(DiscardReason::kNoQuotedSpan) > 0);
  const auto t = r.Tallies();
  CHECK(t["gendered"].get<std::size_t>() + t["neutral"].get<std::size_t>() ==
        r.entries.size());
}

TEST_CASE("genderless languages are translated directly") {
  const auto corpus = Corpus(12);
  Harness h(Behavior("gender-suffix"));
  const auto r = h.Run(corpus, "fi");
  CheckConservation(r, corpus);
  CHECK(r.CountKind(EntryKind::kGendered) == 0);
  CHECK(r.entries.size() == 12);
  for (const auto& e : r.entries) {
    CHECK(e.masc_text == e.fem_text);
    CHECK(e.provenance["path"] == "direct");
  }
}

TEST_CASE("source language copies the corpus") {
  const auto corpus = Corpus(5);
  Harness h;
  const auto r = h.Run(corpus, "en");
  CheckConservation(r, corpus);
  CHECK(h.translator.provider_calls() == 0);
  CHECK(r.entries[2].masc_text == corpus[2].text);
}

TEST_CASE("QE of zero discards everything") {
  const auto corpus = Corpus(16);
  for (const std::string lang : {"sk", "fi"}) {
    INFO(lang);
    Harness h(Behavior("gender-suffix"), std::make_shared<ZeroQe>());
    const auto r = h.Run(corpus, lang);
    CheckConservation(r, corpus);
    CHECK(r.entries.empty());
    CHECK(r.CountReason(DiscardReason::kQeBelowThreshold) == 16);
  }
}

TEST_CASE("QE unsupported for a language follows the policy") {
  const auto corpus = Corpus(6);
  FixtureQeOptions q{0.0, {"sk"}};
  {
    Harness h(Behavior("gender-suffix"), q);
    const auto r = h.Run(corpus, "sk");
    CheckConservation(r, corpus);
    CHECK(r.entries.size() == 6);
    CHECK(r.entries[0].provenance["qe_skipped"] == true);
    CHECK_FALSE(r.warnings.empty());
  }
  {
    Harness h(Behavior("gender-suffix"), q);
    ExpansionOptions o;
    o.unsupported_qe = UnsupportedQePolicy::kDiscardAll;
    const auto r = h.Run(corpus, "sk", o);
    CheckConservation(r, corpus);
    CHECK(r.CountReason(DiscardReason::kBackendUnsupported) == 6);
  }
}

TEST_CASE("translation failures become discards") {
  const auto corpus = Corpus(4);
  auto t = Behavior("gender-suffix");
  t.failing_texts = {WrapInitial(corpus[1].text, Gender::kFeminine,
                                 ProfileRegistry::Builtin().Get("sk"))};
  Harness h(t);
  const auto r = h.Run(corpus, "sk");
  CheckConservation(r, corpus);
  REQUIRE(r.discards.size() == 1);
  CHECK(r.discards[0].source_id == "s2");
  CHECK(r.discards[0].reason == DiscardReason::kTranslationFailed);
  CHECK(r.discards[0].stereotype_id == 2);
}

TEST_CASE("discard records round-trip") {
  const std::vector<DiscardRecord> records = {
      {"s1", "sk", DiscardReason::kNoQuotedSpan, "detail \"q\"", 3},
      {"s2", "fi", DiscardReason::kQeBelowThreshold, "", 16}};
  CHECK(ParseDiscards(SerializeDiscards(records)) == records);
  CHECK_THROWS_AS(ParseDiscards("{\"source_id\": 1}\n"), Error);
}
