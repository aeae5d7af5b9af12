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

// Dataset expansion: wrap -> translate -> QE filter -> extract -> classify.
//
// Languages without first-person gender marking are translated directly and
// kept when the translation passes QE. Gendered languages translate the
// sentence inside a masculine and a feminine sentence-initial template; both
// translations must pass QE, the inner sentences are extracted, and the pair
// becomes a neutral entry (identical), a gendered minimal pair (one word,
// few character edits) or a discard.

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "stereoeval/backends.hpp"
#include "stereoeval/corpus.hpp"
#include "stereoeval/diff.hpp"
#include "stereoeval/templating.hpp"

namespace stereoeval {

struct PairHeuristicConfig {
  std::size_t max_differing_words = 1;
  std::size_t max_char_edit = 2;
  double qe_threshold = 0.85;

  // Throws ConfigError.
  void Validate() const;
};

enum class UnsupportedQePolicy { kSkipQe, kDiscardAll };
std::string_view ToString(UnsupportedQePolicy policy);
std::optional<UnsupportedQePolicy> ParseUnsupportedQePolicy(std::string_view text);

enum class DiscardReason {
  kQeBelowThreshold,
  kNoQuotedSpan,
  kPairTooDifferent,
  kTranslationFailed,
  kBackendUnsupported,
};
inline constexpr DiscardReason kAllDiscardReasons[] = {
    DiscardReason::kQeBelowThreshold, DiscardReason::kNoQuotedSpan,
    DiscardReason::kPairTooDifferent, DiscardReason::kTranslationFailed,
    DiscardReason::kBackendUnsupported};
std::string_view ToString(DiscardReason reason);
std::optional<DiscardReason> ParseDiscardReason(std::string_view text);

struct DiscardRecord {
  std::string source_id;
  std::string lang;
  DiscardReason reason = DiscardReason::kTranslationFailed;
  std::string detail;
  int stereotype_id = 0;

  bool operator==(const DiscardRecord&) const = default;
};

nlohmann::json DiscardToJson(const DiscardRecord& record);
DiscardRecord DiscardFromJson(const nlohmann::json& record);
std::string SerializeDiscards(std::span<const DiscardRecord> records);
std::vector<DiscardRecord> ParseDiscards(std::string_view content);
// Every *.jsonl file in `dir`, lexicographic filename order.
std::vector<DiscardRecord> ReadDiscardDir(const std::filesystem::path& dir);

struct PairClassification {
  enum class Outcome { kNeutral, kGendered, kDiscard };
  Outcome outcome = Outcome::kDiscard;
  // For kGendered: differing word positions with their words and edits.
  std::vector<std::size_t> positions;
  std::vector<std::pair<std::string, std::string>> words;
  std::vector<std::size_t> char_edits;
  std::string detail;  // why a pair was discarded
};

// Throws InvalidArgument for empty texts.
PairClassification ClassifyPair(std::string_view masc_text, std::string_view fem_text,
                                const PairHeuristicConfig& config);

struct ExpansionOptions {
  PairHeuristicConfig heuristic;
  UnsupportedQePolicy unsupported_qe = UnsupportedQePolicy::kSkipQe;
  std::string source_lang = "en";
};

struct ExpansionResult {
  std::vector<DatasetEntry> entries;
  std::vector<DiscardRecord> discards;
  std::vector<std::string> warnings;

  std::size_t CountKind(EntryKind kind) const;
  std::size_t CountReason(DiscardReason reason) const;
  nlohmann::json Tallies() const;
};

// Every input sentence yields exactly one entry or one discard, in input
// order. Backend failures become discards; only ConfigError escapes.
ExpansionResult ExpandLanguage(std::span<const SourceSentence> corpus,
                               const LanguageProfile& profile, TranslationClient& translator,
                               QeClient& qe, const ExpansionOptions& options);

}  // namespace stereoeval
