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
#include <limits>
#include <random>

#include "oracles.hpp"
#include "stereoeval/csv.hpp"
#include "stereoeval/error.hpp"
#include "stereoeval/util.hpp"

using namespace stereoeval;

TEST_CASE("utf8 decoding") {
  CHECK(DecodeUtf8("abc") == U"abc");
  CHECK(DecodeUtf8("emotívny") == U"emotívny");
  CHECK(DecodeUtf8("ğ€😀") == U"ğ€😀");
  // Truncated and invalid sequences become U+FFFD.
  CHECK(DecodeUtf8("a\xC3") == U"a�");
  CHECK(DecodeUtf8("\xFF" "b") == U"�b");
  CHECK(DecodeUtf8("\xE2\x82") == U"�");
}

TEST_CASE("whitespace split and trim") {
  CHECK(SplitWhitespace("  Som   emotívny.\t") == std::vector<std::string>{"Som", "emotívny."});
  CHECK(SplitWhitespace("").empty());
  CHECK(SplitWhitespace(" \n ").empty());
  CHECK(Trim("  x y \r\n") == "x y");
  for (const std::string s : {"a b  c", " Mi sono arresa,  senza ", "x\ty\nz"}) {
    CHECK(SplitWhitespace(s) == oracle::Words(s));
  }
}

TEST_CASE("sha256 known vectors") {
  CHECK(Sha256Hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(Sha256Hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(Fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(Fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("FormatDouble round-trips") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = dist(rng);
    CHECK(std::stod(FormatDouble(v)) == v);
  }
  CHECK(FormatDouble(0.5) == "0.5");
  CHECK(FormatDouble(1.0) == "1");
}

TEST_CASE("file helpers") {
  oracle::TempDir dir;
  const auto path = dir.path() / "nested" / "file.txt";
  WriteFileAtomic(path, "hello\n");
  CHECK(ReadFile(path) == "hello\n");
  WriteFileAtomic(path, "bye");
  CHECK(ReadFile(path) == "bye");
  CHECK_THROWS_AS(ReadFile(dir.path() / "missing"), Error);
  try {
    ReadFile(dir.path() / "missing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
}

TEST_CASE("file component sanitizing") {
  CHECK(SanitizeFileComponent("org/model-7b") == "org_model-7b");
  CHECK(SanitizeFileComponent("..") == "_..");
  CHECK(SanitizeFileComponent("") == "_");
}

TEST_CASE("csv parse and write") {
  const auto rows = ParseCsv("\xEF\xBB\xBF" "a,b,c\r\n\"x, y\",\"he said \"\"hi\"\"\",\n1,\"multi\nline\",3\n");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].fields == std::vector<std::string>{"a", "b", "c"});
  CHECK(rows[1].fields == std::vector<std::string>{"x, y", "he said \"hi\"", ""});
  CHECK(rows[2].fields == std::vector<std::string>{"1", "multi\nline", "3"});
  CHECK(rows[2].line == 3);
  CHECK_THROWS_AS(ParseCsv("a,\"open\n"), Error);
  CHECK(ParseCsv("").empty());

  const std::vector<std::string> fields = {"plain", "with,comma", "quote\"d", "new\nline", ""};
  const auto back = ParseCsv(CsvLine(fields));
  REQUIRE(back.size() == 1);
  CHECK(back[0].fields == fields);
}
