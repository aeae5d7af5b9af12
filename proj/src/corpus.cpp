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

#include "stereoeval/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "stereoeval/diff.hpp"
#include "stereoeval/error.hpp"
#include "stereoeval/util.hpp"

namespace stereoeval {

namespace {

using nlohmann::json;

constexpr std::array<StereotypeInfo, kStereotypeCount> kStereotypes = {{
    {1, Gender::kFeminine, "Emotional and irrational", 254},
    {2, Gender::kFeminine, "Gentle, kind, and submissive", 215},
    {3, Gender::kFeminine, "Empathetic and caring", 256},
    {4, Gender::kFeminine, "Neat and diligent", 207},
    {5, Gender::kFeminine, "Social", 200},
    {6, Gender::kFeminine, "Weak", 197},
    {7, Gender::kFeminine, "Beautiful", 243},
    {8, Gender::kMasculine, "Tough and rough", 251},
    {9, Gender::kMasculine, "Self-confident", 229},
    {10, Gender::kMasculine, "Professional", 215},
    {11, Gender::kMasculine, "Rational", 231},
    {12, Gender::kMasculine, "Providers", 222},
    {13, Gender::kMasculine, "Leaders", 222},
    {14, Gender::kMasculine, "Childish", 194},
    {15, Gender::kMasculine, "Sexual", 208},
    {16, Gender::kMasculine, "Strong", 221},
}};

std::vector<std::string_view> SplitLines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= content.size()) {
    const std::size_t end = content.find('\n', start);
    std::string_view line = content.substr(
        start, end == std::string_view::npos ? std::string_view::npos
                                             : end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find('\t', start);
    fields.push_back(line.substr(start, end == std::string_view::npos
                                            ? std::string_view::npos
                                            : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return fields;
}

std::string LineError(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

int ParseStereotype(std::string_view text, std::size_t line) {
  text = Trim(text);
  int value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw DataError(LineError(line, "stereotype is not an integer: '" +
                                        std::string(text) + "'"));
  }
  return value;
}

void AddSentence(CorpusLoadResult& result, std::set<std::string>& seen,
                 SourceSentence sentence, std::size_t line) {
  if (sentence.text.empty()) throw DataError(LineError(line, "empty text"));
  if (!IsValidStereotypeId(sentence.stereotype_id)) {
    throw DataError(LineError(line, "unknown stereotype id " +
                                        std::to_string(sentence.stereotype_id)));
  }
  if (!seen.insert(sentence.id).second) {
    throw DataError(LineError(line, "duplicate id '" + sentence.id + "'"));
  }
  result.sentences.push_back(std::move(sentence));
}

CorpusLoadResult ParseJsonLines(const std::vector<std::string_view>& lines) {
  CorpusLoadResult result;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (Trim(lines[i]).empty()) continue;
    json record;
    try {
      record = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw DataError(LineError(line_no, std::string("invalid JSON: ") + e.what()));
    }
    if (!record.is_object() || !record.contains("text") ||
        !record["text"].is_string() || !record.contains("stereotype")) {
      throw DataError(LineError(line_no, "expected fields 'text' and 'stereotype'"));
    }
    SourceSentence sentence;
    sentence.text = std::string(Trim(record["text"].get<std::string>()));
    const json& stereotype = record["stereotype"];
    if (stereotype.is_number_integer()) {
      sentence.stereotype_id = stereotype.get<int>();
    } else if (stereotype.is_string()) {
      sentence.stereotype_id = ParseStereotype(stereotype.get<std::string>(), line_no);
    } else {
      throw DataError(LineError(line_no, "stereotype is not an integer"));
    }
    if (record.contains("id")) {
      const json& id = record["id"];
      sentence.id = id.is_string() ? id.get<std::string>() : id.dump();
    } else {
      sentence.id = std::to_string(result.sentences.size() + 1);
    }
    AddSentence(result, seen, std::move(sentence), line_no);
  }
  return result;
}

CorpusLoadResult ParseTsv(const std::vector<std::string_view>& lines) {
  CorpusLoadResult result;
  std::size_t header_index = 0;
  while (header_index < lines.size() && Trim(lines[header_index]).empty()) {
    ++header_index;
  }
  if (header_index == lines.size()) return result;

  const auto header = SplitTabs(lines[header_index]);
  int text_col = -1, stereotype_col = -1, id_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = Trim(header[c]);
    if (name == "text") text_col = static_cast<int>(c);
    if (name == "stereotype") stereotype_col = static_cast<int>(c);
    if (name == "id") id_col = static_cast<int>(c);
  }
  if (text_col < 0 || stereotype_col < 0) {
    throw DataError(LineError(header_index + 1,
                              "header must name 'text' and 'stereotype' columns"));
  }
  const auto needed = static_cast<std::size_t>(
      std::max({text_col, stereotype_col, id_col}) + 1);

  std::set<std::string> seen;
  for (std::size_t i = header_index + 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (Trim(lines[i]).empty()) continue;
    const auto fields = SplitTabs(lines[i]);
    if (fields.size() < needed) {
      throw DataError(LineError(line_no, "expected " + std::to_string(needed) +
                                             " tab-separated fields, got " +
                                             std::to_string(fields.size())));
    }
    SourceSentence sentence;
    sentence.text = std::string(Trim(fields[text_col]));
    sentence.stereotype_id = ParseStereotype(fields[stereotype_col], line_no);
    sentence.id = id_col >= 0 ? std::string(Trim(fields[id_col]))
                              : std::to_string(result.sentences.size() + 1);
    if (sentence.id.empty()) throw DataError(LineError(line_no, "empty id"));
    AddSentence(result, seen, std::move(sentence), line_no);
  }
  return result;
}

}  // namespace

std::string_view ToString(Gender gender) {
  return gender == Gender::kMasculine ? "masculine" : "feminine";
}

const std::array<StereotypeInfo, kStereotypeCount>& Stereotypes() {
  return kStereotypes;
}

bool IsValidStereotypeId(int id) { return id >= 1 && id <= kStereotypeCount; }

const StereotypeInfo& StereotypeById(int id) {
  if (!IsValidStereotypeId(id)) {
    throw InvalidArgument("unknown stereotype id " + std::to_string(id));
  }
  return kStereotypes[static_cast<std::size_t>(id - 1)];
}

std::vector<int> FeminineStereotypeIds() {
  std::vector<int> ids;
  for (const auto& s : kStereotypes)
    if (s.gender == Gender::kFeminine) ids.push_back(s.id);
  return ids;
}

std::vector<int> MasculineStereotypeIds() {
  std::vector<int> ids;
  for (const auto& s : kStereotypes)
    if (s.gender == Gender::kMasculine) ids.push_back(s.id);
  return ids;
}

CorpusLoadResult ParseSourceCorpus(std::string_view content) {
  const auto lines = SplitLines(content);
  auto first = std::find_if(lines.begin(), lines.end(), [](std::string_view l) {
    return !Trim(l).empty();
  });
  if (first == lines.end()) {
    CorpusLoadResult empty;
    empty.warnings.push_back("seed corpus is empty");
    return empty;
  }
  CorpusLoadResult result =
      Trim(*first).front() == '{' ? ParseJsonLines(lines) : ParseTsv(lines);
  if (result.sentences.empty()) {
    result.warnings.push_back("seed corpus has no sentences");
  }
  return result;
}

CorpusLoadResult LoadSourceCorpus(const std::filesystem::path& path) {
  return ParseSourceCorpus(ReadFile(path));
}

StereotypeCounts CountPerStereotype(std::span<const SourceSentence> sentences) {
  StereotypeCounts counts{};
  for (const auto& s : sentences) {
    if (IsValidStereotypeId(s.stereotype_id)) ++counts[s.stereotype_id - 1];
  }
  return counts;
}

std::vector<std::string> SeedCountMismatches(const StereotypeCounts& counts) {
  std::vector<std::string> out;
  for (const auto& s : kStereotypes) {
    const int got = counts[static_cast<std::size_t>(s.id - 1)];
    if (got != s.expected_seed_count) {
      out.push_back("stereotype " + std::to_string(s.id) + " has " +
                    std::to_string(got) + " sentences, published corpus has " +
                    std::to_string(s.expected_seed_count));
    }
  }
  return out;
}

std::string_view ToString(EntryKind kind) {
  return kind == EntryKind::kGendered ? "gendered" : "neutral";
}

std::optional<EntryKind> ParseEntryKind(std::string_view text) {
  if (text == "gendered") return EntryKind::kGendered;
  if (text == "neutral") return EntryKind::kNeutral;
  return std::nullopt;
}

std::string MakeEntryId(std::string_view source_id, std::string_view lang,
                        EntryKind kind) {
  std::string id(lang);
  id += ':';
  id += source_id;
  id += kind == EntryKind::kGendered ? ":g" : ":n";
  return id;
}

std::optional<std::string> ValidateEntry(const DatasetEntry& entry) {
  if (entry.entry_id.empty()) return "empty entry_id";
  if (entry.source_id.empty()) return "empty source_id";
  if (entry.lang.empty()) return "empty lang";
  if (!IsValidStereotypeId(entry.stereotype_id)) {
    return "stereotype_id out of range: " + std::to_string(entry.stereotype_id);
  }
  if (entry.masc_text.empty() || entry.fem_text.empty()) return "empty text";
  if (entry.kind == EntryKind::kNeutral) {
    if (entry.masc_text != entry.fem_text) return "neutral entry with differing texts";
    return std::nullopt;
  }
  if (entry.masc_text == entry.fem_text) return "gendered entry with equal texts";

  std::size_t max_words = 1;
  std::size_t max_edit = 2;
  if (entry.provenance.is_object()) {
    max_words = entry.provenance.value("max_differing_words", max_words);
    max_edit = entry.provenance.value("max_char_edit", max_edit);
  }
  const auto tokens_m = SplitWhitespace(entry.masc_text);
  const auto tokens_f = SplitWhitespace(entry.fem_text);
  if (tokens_m.size() != tokens_f.size()) {
    return "gendered entry with differing word counts";
  }
  const auto positions = DifferingPositions(tokens_m, tokens_f);
  if (positions.empty()) return "gendered entry differing only in whitespace";
  if (positions.size() > max_words) {
    return "gendered entry differs on " + std::to_string(positions.size()) +
           " words";
  }
  for (std::size_t p : positions) {
    if (Levenshtein(tokens_m[p], tokens_f[p]) > max_edit) {
      return "gendered entry word " + std::to_string(p) +
             " exceeds character edit bound";
    }
  }
  return std::nullopt;
}

json EntryToJson(const DatasetEntry& entry) {
  return json{{"schema_version", kDatasetSchemaVersion},
              {"entry_id", entry.entry_id},
              {"source_id", entry.source_id},
              {"lang", entry.lang},
              {"kind", std::string(ToString(entry.kind))},
              {"masc_text", entry.masc_text},
              {"fem_text", entry.fem_text},
              {"stereotype_id", entry.stereotype_id},
              {"provenance", entry.provenance}};
}

DatasetEntry EntryFromJson(const json& record) {
  if (!record.is_object()) throw DataError("record is not an object");
  const int version = record.value("schema_version", 0);
  if (version != kDatasetSchemaVersion) {
    throw DataError("unsupported schema_version " + std::to_string(version));
  }
  DatasetEntry entry;
  try {
    entry.entry_id = record.at("entry_id").get<std::string>();
    entry.source_id = record.at("source_id").get<std::string>();
    entry.lang = record.at("lang").get<std::string>();
    const auto kind = ParseEntryKind(record.at("kind").get<std::string>());
    if (!kind) throw DataError("unknown kind");
    entry.kind = *kind;
    entry.masc_text = record.at("masc_text").get<std::string>();
    entry.fem_text = record.at("fem_text").get<std::string>();
    entry.stereotype_id = record.at("stereotype_id").get<int>();
    entry.provenance = record.value("provenance", json::object());
  } catch (const json::exception& e) {
    throw DataError(std::string("bad field: ") + e.what());
  }
  return entry;
}

std::string SerializeDataset(std::span<const DatasetEntry> entries) {
  std::string out;
  for (const auto& entry : entries) {
    if (auto reason = ValidateEntry(entry)) {
      throw InvalidArgument("entry '" + entry.entry_id + "': " + *reason);
    }
    out += EntryToJson(entry).dump();
    out += '\n';
  }
  return out;
}

void WriteDataset(std::span<const DatasetEntry> entries,
                  const std::filesystem::path& path) {
  WriteFileAtomic(path, SerializeDataset(entries));
}

DatasetReadResult ParseDataset(std::string_view content) {
  DatasetReadResult result;
  const auto lines = SplitLines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    try {
      DatasetEntry entry = EntryFromJson(json::parse(lines[i]));
      if (auto reason = ValidateEntry(entry)) {
        result.rejections.push_back(LineError(i + 1, *reason));
        continue;
      }
      result.by_lang[entry.lang].push_back(entry);
      result.entries.push_back(std::move(entry));
    } catch (const json::exception& e) {
      result.rejections.push_back(LineError(i + 1, e.what()));
    } catch (const Error& e) {
      result.rejections.push_back(LineError(i + 1, e.what()));
    }
  }
  return result;
}

DatasetReadResult ReadDataset(const std::filesystem::path& path) {
  return ParseDataset(ReadFile(path));
}

DatasetReadResult ReadDatasetDir(const std::filesystem::path& dir) {
  DatasetReadResult merged;
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("dataset directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& item : std::filesystem::directory_iterator(dir)) {
    if (item.is_regular_file() && item.path().extension() == ".jsonl") {
      files.push_back(item.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    DatasetReadResult part = ReadDataset(file);
    for (auto& r : part.rejections) {
      merged.rejections.push_back(file.filename().string() + " " + r);
    }
    for (auto& e : part.entries) {
      merged.by_lang[e.lang].push_back(e);
      merged.entries.push_back(std::move(e));
    }
  }
  return merged;
}

}  // namespace stereoeval
