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

// Seed corpus ingestion, the stereotype taxonomy, and dataset persistence.

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace stereoeval {

enum class Gender { kMasculine, kFeminine };
std::string_view ToString(Gender gender);

inline constexpr int kStereotypeCount = 16;
inline constexpr int kPublishedSeedTotal = 3565;

struct StereotypeInfo {
  int id;
  Gender gender;  // the gender the stereotype is about
  std::string_view label;
  int expected_seed_count;  // sentences in the published seed corpus
};

// Ids 1-7 are feminine stereotypes, 8-16 masculine.
const std::array<StereotypeInfo, kStereotypeCount>& Stereotypes();
const StereotypeInfo& StereotypeById(int id);
bool IsValidStereotypeId(int id);
std::vector<int> FeminineStereotypeIds();
std::vector<int> MasculineStereotypeIds();

struct SourceSentence {
  std::string id;
  std::string text;
  int stereotype_id = 0;

  bool operator==(const SourceSentence&) const = default;
};

struct CorpusLoadResult {
  std::vector<SourceSentence> sentences;
  std::vector<std::string> warnings;
};

// Accepts JSON lines ({"text": ..., "stereotype": n, "id"?: ...}) or
// tab-separated text with a header row naming `text` and `stereotype`
// (and optionally `id`). Rows without an id get their 1-based record index.
// Throws DataError naming the line for malformed rows, unknown stereotype
// ids, or duplicate ids.
CorpusLoadResult ParseSourceCorpus(std::string_view content);
CorpusLoadResult LoadSourceCorpus(const std::filesystem::path& path);

using StereotypeCounts = std::array<int, kStereotypeCount>;  // index id-1
StereotypeCounts CountPerStereotype(std::span<const SourceSentence> sentences);

// Human-readable descriptions of every stereotype whose count differs from
// the published seed corpus. Empty when they all match.
std::vector<std::string> SeedCountMismatches(const StereotypeCounts& counts);

enum class EntryKind { kNeutral, kGendered };
std::string_view ToString(EntryKind kind);
std::optional<EntryKind> ParseEntryKind(std::string_view text);

struct DatasetEntry {
  std::string entry_id;
  std::string source_id;
  std::string lang;
  EntryKind kind = EntryKind::kNeutral;
  std::string masc_text;
  std::string fem_text;
  int stereotype_id = 0;
  nlohmann::json provenance = nlohmann::json::object();

  bool operator==(const DatasetEntry&) const = default;
};

inline constexpr int kDatasetSchemaVersion = 1;

// Deterministic in (source_id, lang, kind) so re-runs reproduce ids.
std::string MakeEntryId(std::string_view source_id, std::string_view lang,
                        EntryKind kind);

// Returns the reason an entry violates the dataset invariants, if any.
// Gendered entries must differ on between 1 and
// provenance["max_differing_words"] (default 1) word positions, each within
// provenance["max_char_edit"] (default 2) character edits.
std::optional<std::string> ValidateEntry(const DatasetEntry& entry);

nlohmann::json EntryToJson(const DatasetEntry& entry);
DatasetEntry EntryFromJson(const nlohmann::json& record);

// Throws InvalidArgument if any entry is invalid.
std::string SerializeDataset(std::span<const DatasetEntry> entries);
void WriteDataset(std::span<const DatasetEntry> entries,
                  const std::filesystem::path& path);

struct DatasetReadResult {
  std::vector<DatasetEntry> entries;  // accepted, in file order
  std::map<std::string, std::vector<DatasetEntry>> by_lang;
  std::vector<std::string> rejections;  // "line N: reason"
};

DatasetReadResult ParseDataset(std::string_view content);
DatasetReadResult ReadDataset(const std::filesystem::path& path);

// Reads every *.jsonl file in a directory in lexicographic filename order.
DatasetReadResult ReadDatasetDir(const std::filesystem::path& dir);

}  // namespace stereoeval
