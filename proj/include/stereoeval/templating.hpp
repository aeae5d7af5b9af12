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

// Per-language gendered templates. Sentences are wrapped in sentence-initial
// templates before translation (so the translator has to commit to a gender)
// and in sentence-final templates when a neutral sentence is turned into a
// minimal pair for scoring.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stereoeval/corpus.hpp"

namespace stereoeval {

// How an entry is turned into a masculine/feminine pair for scoring.
enum class TemplateMode { kGenderedPair, kNoun, kPronoun };
std::string_view ToString(TemplateMode mode);
std::optional<TemplateMode> ParseTemplateMode(std::string_view text);

inline constexpr std::string_view kSlot = "{S}";

struct QuotePair {
  std::string open;
  std::string close;
  bool operator==(const QuotePair&) const = default;
};

struct TemplateSet {
  std::string initial_masc = "The man said \"{S}\"";
  std::string initial_fem = "The woman said \"{S}\"";
  std::string final_noun_masc = "\"{S},\" the man said";
  std::string final_noun_fem = "\"{S},\" the woman said";
  std::optional<std::string> final_pron_masc = "\"{S},\" he said";
  std::optional<std::string> final_pron_fem = "\"{S},\" she said";
  std::vector<QuotePair> quote_pairs = {{"\"", "\""}};
  // Target-language renderings of the initial templates, used only when no
  // quote span can be found in a translation.
  std::vector<std::string> translated_initial;
};

struct LanguageProfile {
  std::string code;
  std::string name;
  bool gendered_morphology = false;
  bool pronoun_templates_available = true;
  TemplateSet templates;
  std::string notes;
  // Surfaced verbatim in run manifests and reports.
  std::vector<std::string> warnings;
};

// Throws ConfigError describing the first violated invariant.
void ValidateProfile(const LanguageProfile& profile);

std::string WrapInitial(std::string_view text, Gender gender,
                        const LanguageProfile& profile);

// `mode` must be kNoun or kPronoun. Pronoun mode on a profile without
// pronoun templates throws ConfigError.
std::string WrapFinal(std::string_view text, Gender gender, TemplateMode mode,
                      const LanguageProfile& profile);

struct Extraction {
  std::optional<std::string> text;
  std::string failure;  // reason code when `text` is empty
  std::string method;   // "quotes" or "skeleton"
};

inline constexpr std::string_view kNoQuotedSpan = "no-quoted-span";

Extraction ExtractQuoted(std::string_view translated,
                         const LanguageProfile& profile);

TemplateMode SelectTemplateMode(const LanguageProfile& profile);

// Quote glyph pairs tried after a profile's own pairs.
const std::vector<QuotePair>& UniversalQuotePairs();

class ProfileRegistry {
 public:
  // The registry shipped with the library (data/languages.json).
  static const ProfileRegistry& Builtin();
  static ProfileRegistry FromJson(const nlohmann::json& document);

  // Fields present in `overrides` replace the matching profile's fields;
  // unknown codes add new profiles. Every touched profile is revalidated.
  void Merge(const nlohmann::json& overrides);
  void MergeFile(const std::filesystem::path& path);

  bool Contains(std::string_view code) const;
  const LanguageProfile& Get(std::string_view code) const;
  std::vector<std::string> Codes() const;
  nlohmann::json ToJson() const;

 private:
  std::map<std::string, LanguageProfile, std::less<>> profiles_;
};

nlohmann::json ProfileToJson(const LanguageProfile& profile);

}  // namespace stereoeval
