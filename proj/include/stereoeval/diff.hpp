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

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace stereoeval {

// Unit-cost insert/delete/substitute distance over Unicode scalar values.
std::size_t Levenshtein(std::string_view a, std::string_view b);

struct WordDiff {
  enum class Kind { kEqual, kOneWord, kOther };
  Kind kind = Kind::kOther;
  // Populated only for kOneWord.
  std::size_t index = 0;
  std::string word_a;
  std::string word_b;
};

// Whitespace tokenization, case-sensitive, punctuation kept on tokens.
WordDiff DiffWords(std::string_view a, std::string_view b);

// Indices where two equal-length token lists differ. Empty when the token
// counts differ as well as when the lists are identical; check sizes first.
std::vector<std::size_t> DifferingPositions(
    const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace stereoeval
