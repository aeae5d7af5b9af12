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

#include "stereoeval/diff.hpp"

#include <algorithm>
#include <numeric>

#include "stereoeval/util.hpp"

namespace stereoeval {

std::size_t Levenshtein(std::string_view a, std::string_view b) {
  const std::u32string s1 = DecodeUtf8(a);
  const std::u32string s2 = DecodeUtf8(b);
  const std::size_t n = s2.size();

  // Single-row dynamic program; `diagonal` carries row[y-1][x-1].
  std::vector<std::size_t> row(n + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t y = 1; y <= s1.size(); ++y) {
    std::size_t diagonal = row[0];
    row[0] = y;
    for (std::size_t x = 1; x <= n; ++x) {
      const std::size_t above = row[x];
      const std::size_t substitute =
          diagonal + (s1[y - 1] == s2[x - 1] ? 0 : 1);
      row[x] = std::min({substitute, above + 1, row[x - 1] + 1});
      diagonal = above;
    }
  }
  return row[n];
}

std::vector<std::size_t> DifferingPositions(
    const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> positions;
  if (a.size() != b.size()) return positions;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) positions.push_back(i);
  }
  return positions;
}

WordDiff DiffWords(std::string_view a, std::string_view b) {
  const auto tokens_a = SplitWhitespace(a);
  const auto tokens_b = SplitWhitespace(b);
  WordDiff diff;
  if (tokens_a.size() != tokens_b.size()) return diff;
  const auto positions = DifferingPositions(tokens_a, tokens_b);
  if (positions.empty()) {
    diff.kind = WordDiff::Kind::kEqual;
  } else if (positions.size() == 1) {
    diff.kind = WordDiff::Kind::kOneWord;
    diff.index = positions.front();
    diff.word_a = tokens_a[diff.index];
    diff.word_b = tokens_b[diff.index];
  }
  return diff;
}

}  // namespace stereoeval
