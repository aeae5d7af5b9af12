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

#include "stereoeval/templating.hpp"

#include "stereoeval/error.hpp"
#include "stereoeval/util.hpp"

namespace stereoeval {

namespace {

using nlohmann::json;

constexpr const char* kBuiltinLanguages =
#include "builtin_languages.inc"
    ;

std::size_t CountSlots(std::string_view wrapper) {
  std::size_t count = 0;
  for (std::size_t pos = wrapper.find(kSlot); pos != std::string_view::npos;
       pos = wrapper.find(kSlot, pos + kSlot.size())) {
    ++count;
  }
  return count;
}

std::string Substitute(std::string_view wrapper, std::string_view text) {
  const std::size_t pos = wrapper.find(kSlot);
  std::string out;
  out.reserve(wrapper.size() + text.size());
  out.append(wrapper.substr(0, pos));
  out.append(text);
  out.append(wrapper.substr(pos + kSlot.size()));
  return out;
}

void CheckWrapper(const LanguageProfile& p, std::string_view field,
                  std::string_view wrapper) {
  if (CountSlots(wrapper) != 1) {
    throw ConfigError("profile '" + p.code + "': " + std::string(field) +
                      " must contain exactly one " + std::string(kSlot));
  }
}

// Returns [begin, end) of the content of the first balanced span.
std::optional<std::pair<std::size_t, std::size_t>> FindBalanced(
    std::string_view text, const QuotePair& quotes) {
  const std::string_view open = quotes.open;
  const std::string_view close = quotes.close;
  if (open.empty() || close.empty()) return std::nullopt;

  for (std::size_t start = text.find(open); start != std::string_view::npos;
       start = text.find(open, start + open.size())) {
    const std::size_t content = start + open.size();
    if (open == close) {
      const std::size_t end = text.find(close, content);
      if (end == std::string_view::npos) return std::nullopt;
      return std::make_pair(content, end);
    }
    int depth = 1;
    std::size_t pos = content;
    while (pos < text.size()) {
      if (text.substr(pos).starts_with(close)) {
        if (--depth == 0) return std::make_pair(content, pos);
        pos += close.size();
      } else if (text.substr(pos).starts_with(open)) {
        ++depth;
        pos += open.size();
      } else {
        ++pos;
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> MatchSkeleton(std::string_view text,
                                         std::string_view skeleton) {
  const std::size_t slot = skeleton.find(kSlot);
  if (slot == std::string_view::npos) return std::nullopt;
  const auto prefix = Trim(skeleton.substr(0, slot));
  const auto suffix = Trim(skeleton.substr(slot + kSlot.size()));
  const auto body = Trim(text);
  if (body.size() < prefix.size() + suffix.size()) return std::nullopt;
  if (!body.starts_with(prefix) || !body.ends_with(suffix)) return std::nullopt;
  const auto middle =
      Trim(body.substr(prefix.size(), body.size() - prefix.size() - suffix.size()));
  if (middle.empty()) return std::nullopt;
  return std::string(middle);
}

std::optional<std::string> OptionalString(const json& value) {
  if (value.is_null()) return std::nullopt;
  return value.get<std::string>();
}

void ApplyFields(LanguageProfile& p, const json& fields) {
  if (!fields.is_object()) {
    throw ConfigError("profile '" + p.code + "' must be a JSON object");
  }
  try {
    auto& t = p.templates;
    for (const auto& [key, value] : fields.items()) {
      if (key == "name") p.name = value.get<std::string>();
      else if (key == "gendered_morphology") p.gendered_morphology = value.get<bool>();
      else if (key == "pronoun_templates_available")
        p.pronoun_templates_available = value.get<bool>();
      else if (key == "initial_masc") t.initial_masc = value.get<std::string>();
      else if (key == "initial_fem") t.initial_fem = value.get<std::string>();
      else if (key == "final_noun_masc") t.final_noun_masc = value.get<std::string>();
      else if (key == "final_noun_fem") t.final_noun_fem = value.get<std::string>();
      else if (key == "final_pron_masc") t.final_pron_masc = OptionalString(value);
      else if (key == "final_pron_fem") t.final_pron_fem = OptionalString(value);
      else if (key == "quote_pairs") {
        t.quote_pairs.clear();
        for (const auto& pair : value) {
          if (!pair.is_array() || pair.size() != 2) {
            throw ConfigError("profile '" + p.code +
                              "': quote_pairs entries must be [open, close]");
          }
          t.quote_pairs.push_back({pair[0].get<std::string>(), pair[1].get<std::string>()});
        }
      } else if (key == "translated_initial") {
        t.translated_initial = value.get<std::vector<std::string>>();
      } else if (key == "notes") p.notes = value.get<std::string>();
      else if (key == "warnings") p.warnings = value.get<std::vector<std::string>>();
      else throw ConfigError("profile '" + p.code + "': unknown field '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError("profile '" + p.code + "': " + e.what());
  }
  // Switching pronoun templates off drops inherited pronoun wrappers.
  if (!p.pronoun_templates_available &&
      fields.contains("pronoun_templates_available") &&
      !fields.contains("final_pron_masc") && !fields.contains("final_pron_fem")) {
    p.templates.final_pron_masc.reset();
    p.templates.final_pron_fem.reset();
  }
}

}  // namespace

std::string_view ToString(TemplateMode mode) {
  switch (mode) {
    case TemplateMode::kGenderedPair: return "gendered-pair";
    case TemplateMode::kNoun: return "noun";
    case TemplateMode::kPronoun: return "pronoun";
  }
  return "noun";
}

std::optional<TemplateMode> ParseTemplateMode(std::string_view text) {
  if (text == "gendered-pair") return TemplateMode::kGenderedPair;
  if (text == "noun") return TemplateMode::kNoun;
  if (text == "pronoun") return TemplateMode::kPronoun;
  return std::nullopt;
}

void ValidateProfile(const LanguageProfile& p) {
  if (p.code.empty()) throw ConfigError("profile with empty language code");
  const auto& t = p.templates;
  CheckWrapper(p, "initial_masc", t.initial_masc);
  CheckWrapper(p, "initial_fem", t.initial_fem);
  CheckWrapper(p, "final_noun_masc", t.final_noun_masc);
  CheckWrapper(p, "final_noun_fem", t.final_noun_fem);
  if (t.initial_masc == t.initial_fem || t.final_noun_masc == t.final_noun_fem) {
    throw ConfigError("profile '" + p.code + "': masculine and feminine wrappers must differ");
  }
  const bool has_pron = t.final_pron_masc.has_value() || t.final_pron_fem.has_value();
  if (p.pronoun_templates_available) {
    if (!t.final_pron_masc || !t.final_pron_fem) {
      throw ConfigError("profile '" + p.code +
                        "': pronoun templates declared available but missing");
    }
    CheckWrapper(p, "final_pron_masc", *t.final_pron_masc);
    CheckWrapper(p, "final_pron_fem", *t.final_pron_fem);
    if (*t.final_pron_masc == *t.final_pron_fem) {
      throw ConfigError("profile '" + p.code + "': pronoun wrappers must differ");
    }
  } else if (has_pron) {
    throw ConfigError("profile '" + p.code +
                      "': pronoun wrappers present but pronoun templates unavailable");
  }
  if (t.quote_pairs.empty()) {
    throw ConfigError("profile '" + p.code + "': at least one quote pair required");
  }
  for (const auto& q : t.quote_pairs) {
    if (q.open.empty() || q.close.empty()) {
      throw ConfigError("profile '" + p.code + "': empty quote glyph");
    }
  }
  for (const auto& s : t.translated_initial) {
    CheckWrapper(p, "translated_initial", s);
  }
}

std::string WrapInitial(std::string_view text, Gender gender,
                        const LanguageProfile& profile) {
  if (text.empty()) throw InvalidArgument("WrapInitial: empty text");
  const auto& t = profile.templates;
  return Substitute(gender == Gender::kMasculine ? t.initial_masc : t.initial_fem, text);
}

std::string WrapFinal(std::string_view text, Gender gender, TemplateMode mode,
                      const LanguageProfile& profile) {
  if (text.empty()) throw InvalidArgument("WrapFinal: empty text");
  const auto& t = profile.templates;
  const bool masc = gender == Gender::kMasculine;
  switch (mode) {
    case TemplateMode::kNoun:
      return Substitute(masc ? t.final_noun_masc : t.final_noun_fem, text);
    case TemplateMode::kPronoun:
      if (!profile.pronoun_templates_available || !t.final_pron_masc ||
          !t.final_pron_fem) {
        throw ConfigError("language '" + profile.code +
                          "' has no usable gendered pronoun templates");
      }
      return Substitute(masc ? *t.final_pron_masc : *t.final_pron_fem, text);
    case TemplateMode::kGenderedPair:
      break;
  }
  throw InvalidArgument("WrapFinal: mode must be noun or pronoun");
}

const std::vector<QuotePair>& UniversalQuotePairs() {
  static const std::vector<QuotePair> pairs = {
      {"«", "»"}, {"„", "“"}, {"“", "”"}, {"\"", "\""}, {"‘", "’"}, {"'", "'"},
  };
  return pairs;
}

Extraction ExtractQuoted(std::string_view translated,
                         const LanguageProfile& profile) {
  if (translated.empty()) throw InvalidArgument("ExtractQuoted: empty text");

  auto try_pair = [&](const QuotePair& q) -> std::optional<std::string> {
    const auto span = FindBalanced(translated, q);
    if (!span) return std::nullopt;
    const auto inner = Trim(translated.substr(span->first, span->second - span->first));
    if (inner.empty()) return std::nullopt;
    return std::string(inner);
  };

  for (const auto& q : profile.templates.quote_pairs) {
    if (auto inner = try_pair(q)) return {std::move(inner), "", "quotes"};
  }
  for (const auto& q : UniversalQuotePairs()) {
    if (auto inner = try_pair(q)) return {std::move(inner), "", "quotes"};
  }

  std::optional<std::string> found;
  int matches = 0;
  for (const auto& skeleton : profile.templates.translated_initial) {
    if (auto region = MatchSkeleton(translated, skeleton)) {
      ++matches;
      found = std::move(region);
    }
  }
  if (matches == 1) return {std::move(found), "", "skeleton"};
  return {std::nullopt, std::string(kNoQuotedSpan), ""};
}

TemplateMode SelectTemplateMode(const LanguageProfile& profile) {
  return profile.pronoun_templates_available ? TemplateMode::kPronoun
                                             : TemplateMode::kNoun;
}

const ProfileRegistry& ProfileRegistry::Builtin() {
  static const ProfileRegistry builtin = FromJson(json::parse(kBuiltinLanguages));
  return builtin;
}

ProfileRegistry ProfileRegistry::FromJson(const json& document) {
  ProfileRegistry registry;
  registry.Merge(document);
  return registry;
}

void ProfileRegistry::Merge(const json& overrides) {
  if (!overrides.is_object()) {
    throw ConfigError("language registry must be a JSON object keyed by language code");
  }
  for (const auto& [code, fields] : overrides.items()) {
    auto it = profiles_.find(code);
    LanguageProfile profile;
    if (it != profiles_.end()) {
      profile = it->second;
    } else {
      profile.code = code;
    }
    ApplyFields(profile, fields);
    ValidateProfile(profile);
    profiles_[code] = std::move(profile);
  }
}

void ProfileRegistry::MergeFile(const std::filesystem::path& path) {
  json document;
  try {
    document = json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw ConfigError("language registry " + path.string() + ": " + e.what());
  }
  Merge(document);
}

bool ProfileRegistry::Contains(std::string_view code) const {
  return profiles_.find(code) != profiles_.end();
}

const LanguageProfile& ProfileRegistry::Get(std::string_view code) const {
  auto it = profiles_.find(code);
  if (it == profiles_.end()) {
    throw ConfigError("unknown language '" + std::string(code) + "'");
  }
  return it->second;
}

std::vector<std::string> ProfileRegistry::Codes() const {
  std::vector<std::string> codes;
  for (const auto& [code, _] : profiles_) codes.push_back(code);
  return codes;
}

json ProfileToJson(const LanguageProfile& p) {
  const auto& t = p.templates;
  json quotes = json::array();
  for (const auto& q : t.quote_pairs) quotes.push_back({q.open, q.close});
  return json{{"name", p.name},
              {"gendered_morphology", p.gendered_morphology},
              {"pronoun_templates_available", p.pronoun_templates_available},
              {"initial_masc", t.initial_masc},
              {"initial_fem", t.initial_fem},
              {"final_noun_masc", t.final_noun_masc},
              {"final_noun_fem", t.final_noun_fem},
              {"final_pron_masc", t.final_pron_masc ? json(*t.final_pron_masc) : json()},
              {"final_pron_fem", t.final_pron_fem ? json(*t.final_pron_fem) : json()},
              {"quote_pairs", quotes},
              {"translated_initial", t.translated_initial},
              {"notes", p.notes},
              {"warnings", p.warnings}};
}

json ProfileRegistry::ToJson() const {
  json out = json::object();
  for (const auto& [code, profile] : profiles_) out[code] = ProfileToJson(profile);
  return out;
}

}  // namespace stereoeval
