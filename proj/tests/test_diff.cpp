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
#include "stereoeval/diff.hpp"

using namespace stereoeval;

TEST_CASE("levenshtein examples") {
  CHECK(Levenshtein("emotívny.", "emotívna.") == 1);
  CHECK(Levenshtein("abc", "xyz") == 3);
  CHECK(Levenshtein("", "") == 0);
  CHECK(Levenshtein("", "ab") == 2);
  CHECK(Levenshtein("kitten", "sitting") == 3);
  // Counted over code points, not bytes.
  CHECK(Levenshtein("silný", "silná") == 1);
  CHECK(Levenshtein("ü", "u") == 1);
}

TEST_CASE("levenshtein matches the full-matrix oracle") {
  const std::vector<std::string> alphabet = {"a", "b", "c", "á", "ý", "ß", "ж", "😀"};
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string a, b;
    const auto la = rng() % 9, lb = rng() % 9;
    for (std::size_t i = 0; i < la; ++i) a += alphabet[rng() % alphabet.size()];
    for (std::size_t i = 0; i < lb; ++i) b += alphabet[rng() % alphabet.size()];
    const auto d = Levenshtein(a, b);
    REQUIRE(d == oracle::EditDistance(a, b));
    CHECK(d == Levenshtein(b, a));
    CHECK(Levenshtein(a, a) == 0);
  }
}

TEST_CASE("word diff") {
  const auto one = DiffWords("Som emotívny.", "Som emotívna.");
  CHECK(one.kind == WordDiff::Kind::kOneWord);
  CHECK(one.index == 1);
  CHECK(one.word_a == "emotívny.");
  CHECK(one.word_b == "emotívna.");

  CHECK(DiffWords("a b c", "a b c").kind == WordDiff::Kind::kEqual);
  CHECK(DiffWords("a b c", "a b").kind == WordDiff::Kind::kOther);
  CHECK(DiffWords("a b c", "x b z").kind == WordDiff::Kind::kOther);
  // Case and punctuation are significant.
  CHECK(DiffWords("Som", "som").kind == WordDiff::Kind::kOneWord);
  CHECK(DiffWords("dnes", "dnes.").kind == WordDiff::Kind::kOneWord);
}

TEST_CASE("differing positions") {
  CHECK(DifferingPositions({"a", "b", "c"}, {"a", "x", "y"}) == std::vector<std::size_t>{1, 2});
  CHECK(DifferingPositions({"a"}, {"a", "b"}).empty());
  CHECK(DifferingPositions({}, {}).empty());
}
