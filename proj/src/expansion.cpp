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

#include "stereoeval/expansion.hpp"

#include <algorithm>

#include "stereoeval/error.hpp"
#include "stereoeval/util.hpp"

namespace stereoeval {

namespace {

using nlohmann::json;

DiscardRecord MakeDiscard(const SourceSentence& s, const LanguageProfile& profile,
                          DiscardReason reason, std::string detail) {
  return DiscardRecord{s.id, profile.code, reason, std::move(detail), s.stereotype_id};
}

DiscardReason ReasonForBackendError(ErrorCode code) {
  return code == ErrorCode::kUnsupported ? DiscardReason::kBackendUnsupported
                                         : DiscardReason::kTranslationFailed;
}

DatasetEntry MakeEntry(const SourceSentence& s, const LanguageProfile& profile, EntryKind kind,
                       std::string masc, std::string fem, json provenance) {
  DatasetEntry entry;
  entry.entry_id = MakeEntryId(s.id, profile.code, kind);
  entry.source_id = s.id;
  entry.lang = profile.code;
  entry.kind = kind;
  entry.masc_text = std::move(masc);
  entry.fem_text = std::move(fem);
  entry.stereotype_id = s.stereotype_id;
  entry.provenance = std::move(provenance);
  return entry;
}

// QE outcome for one language: scores per item, or a language-wide skip.
struct QeOutcome {
  std::vector<ItemResult<QeScore>> scores;
  bool skipped = false;      // unsupported language under skip-qe
  bool unsupported = false;  // unsupported language under discard-all
};

QeOutcome RunQe(QeClient& qe, std::span<const QePair> pairs, const LanguageProfile& profile,
                const ExpansionOptions& options, std::vector<std::string>& warnings) {
  QeOutcome outcome;
  if (pairs.empty()) return outcome;
  outcome.scores = qe.EstimateBatch(pairs, profile.code);
  const bool any_unsupported =
      std::any_of(outcome.scores.begin(), outcome.scores.end(), [](const auto& r) {
        return !r.ok() && r.error_code == ErrorCode::kUnsupported;
      });
  if (!any_unsupported) return outcome;
  if (options.unsupported_qe == UnsupportedQePolicy::kSkipQe) {
    outcome.skipped = true;
    warnings.push_back(profile.code +
                       ": quality estimation unsupported for this language; QE filter skipped");
  } else {
    outcome.unsupported = true;
    warnings.push_back(profile.code +
                       ": quality estimation unsupported for this language; all sentences discarded");
  }
  return outcome;
}

void ExpandSourceLanguage(std::span<const SourceSentence> corpus, const LanguageProfile& profile,
                          ExpansionResult& result) {
  for (const auto& s : corpus) {
    result.entries.push_back(MakeEntry(s, profile, EntryKind::kNeutral, s.text, s.text,
                                       json{{"path", "source"}}));
  }
}

void ExpandDirect(std::span<const SourceSentence> corpus, const LanguageProfile& profile,
                  TranslationClient& translator, QeClient& qe, const ExpansionOptions& options,
                  ExpansionResult& result) {
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& s : corpus) texts.push_back(s.text);
  const auto translations = translator.TranslateBatch(texts, options.source_lang, profile.code);

  std::vector<QePair> pairs;
  std::vector<std::size_t> pair_owner;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (translations[i].ok() && !translations[i].value->empty()) {
      pairs.push_back({corpus[i].text, *translations[i].value});
      pair_owner.push_back(i);
    }
  }
  const QeOutcome qe_out = RunQe(qe, pairs, profile, options, result.warnings);

  std::size_t next_pair = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& s = corpus[i];
    const auto& t = translations[i];
    if (!t.ok()) {
      result.discards.push_back(MakeDiscard(s, profile, ReasonForBackendError(t.error_code), t.error));
      continue;
    }
    if (t.value->empty()) {
      result.discards.push_back(
          MakeDiscard(s, profile, DiscardReason::kTranslationFailed, "empty translation"));
      continue;
    }
    const auto& score = qe_out.scores.empty() ? ItemResult<QeScore>{} : qe_out.scores[next_pair];
    ++next_pair;
    json provenance = {{"path", "direct"},
                       {"translator", translator.ProviderId()},
                       {"qe_provider", qe.ProviderId()},
                       {"qe_threshold", options.heuristic.qe_threshold}};
    if (qe_out.unsupported) {
      result.discards.push_back(MakeDiscard(s, profile, DiscardReason::kBackendUnsupported,
                                            "quality estimation unsupported"));
      continue;
    }
    if (qe_out.skipped) {
      provenance["qe"] = nullptr;
      provenance["qe_skipped"] = true;
    } else if (!score.ok()) {
      result.discards.push_back(MakeDiscard(s, profile, ReasonForBackendError(score.error_code),
                                            "quality estimation failed: " + score.error));
      continue;
    } else {
      provenance["qe"] = score.value->value;
      if (score.value->value < options.heuristic.qe_threshold) {
        result.discards.push_back(MakeDiscard(s, profile, DiscardReason::kQeBelowThreshold,
                                              "qe=" + FormatDouble(score.value->value)));
        continue;
      }
    }
    result.entries.push_back(
        MakeEntry(s, profile, EntryKind::kNeutral, *t.value, *t.value, std::move(provenance)));
  }
}

void ExpandTemplated(std::span<const SourceSentence> corpus, const LanguageProfile& profile,
                     TranslationClient& translator, QeClient& qe, const ExpansionOptions& options,
                     ExpansionResult& result) {
  const auto& cfg = options.heuristic;
  std::vector<std::string> sources;  // [masc_0, fem_0, masc_1, fem_1, ...]
  sources.reserve(corpus.size() * 2);
  for (const auto& s : corpus) {
    sources.push_back(WrapInitial(s.text, Gender::kMasculine, profile));
    sources.push_back(WrapInitial(s.text, Gender::kFeminine, profile));
  }
  const auto translations = translator.TranslateBatch(sources, options.source_lang, profile.code);

  // Only sentences whose two translations both succeeded go to QE.
  std::vector<QePair> pairs;
  std::vector<std::size_t> first_pair(corpus.size(), SIZE_MAX);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& m = translations[2 * i];
    const auto& f = translations[2 * i + 1];
    if (m.ok() && f.ok()) {
      first_pair[i] = pairs.size();
      pairs.push_back({sources[2 * i], *m.value});
      pairs.push_back({sources[2 * i + 1], *f.value});
    }
  }
  const QeOutcome qe_out = RunQe(qe, pairs, profile, options, result.warnings);

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& s = corpus[i];
    const auto& m = translations[2 * i];
    const auto& f = translations[2 * i + 1];
    if (!m.ok() || !f.ok()) {
      const auto& bad = m.ok() ? f : m;
      result.discards.push_back(
          MakeDiscard(s, profile, ReasonForBackendError(bad.error_code), bad.error));
      continue;
    }
    if (qe_out.unsupported) {
      result.discards.push_back(MakeDiscard(s, profile, DiscardReason::kBackendUnsupported,
                                            "quality estimation unsupported"));
      continue;
    }
    json provenance = {{"path", "templated"},
                       {"translator", translator.ProviderId()},
                       {"qe_provider", qe.ProviderId()},
                       {"qe_threshold", cfg.qe_threshold},
                       {"max_char_edit", cfg.max_char_edit},
                       {"max_differing_words", cfg.max_differing_words}};
    if (qe_out.skipped) {
      provenance["qe_masc"] = nullptr;
      provenance["qe_fem"] = nullptr;
      provenance["qe_skipped"] = true;
    } else {
      const auto& qm = qe_out.scores[first_pair[i]];
      const auto& qf = qe_out.scores[first_pair[i] + 1];
      if (!qm.ok() || !qf.ok()) {
        const auto& bad = qm.ok() ? qf : qm;
        result.discards.push_back(MakeDiscard(s, profile, ReasonForBackendError(bad.error_code),
                                              "quality estimation failed: " + bad.error));
        continue;
      }
      provenance["qe_masc"] = qm.value->value;
      provenance["qe_fem"] = qf.value->value;
      if (qm.value->value < cfg.qe_threshold || qf.value->value < cfg.qe_threshold) {
        result.discards.push_back(MakeDiscard(
            s, profile, DiscardReason::kQeBelowThreshold,
            "qe_masc=" + FormatDouble(qm.value->value) + " qe_fem=" + FormatDouble(qf.value->value)));
        continue;
      }
    }

    const Extraction em = m.value->empty() ? Extraction{std::nullopt, std::string(kNoQuotedSpan), ""}
                                           : ExtractQuoted(*m.value, profile);
    const Extraction ef = f.value->empty() ? Extraction{std::nullopt, std::string(kNoQuotedSpan), ""}
                                           : ExtractQuoted(*f.value, profile);
    if (!em.text || !ef.text) {
      result.discards.push_back(MakeDiscard(s, profile, DiscardReason::kNoQuotedSpan,
                                            !em.text ? "masculine: " + *m.value
                                                     : "feminine: " + *f.value));
      continue;
    }
    provenance["extraction"] = {em.method, ef.method};

    const auto verdict = ClassifyPair(*em.text, *ef.text, cfg);
    switch (verdict.outcome) {
      case PairClassification::Outcome::kNeutral:
        result.entries.push_back(MakeEntry(s, profile, EntryKind::kNeutral, *em.text, *em.text,
                                           std::move(provenance)));
        break;
      case PairClassification::Outcome::kGendered: {
        json words = json::array();
        for (const auto& [a, b] : verdict.words) words.push_back({a, b});
        provenance["diff_positions"] = verdict.positions;
        provenance["diff_words"] = words;
        provenance["char_edits"] = verdict.char_edits;
        result.entries.push_back(MakeEntry(s, profile, EntryKind::kGendered, *em.text, *ef.text,
                                           std::move(provenance)));
        break;
      }
      case PairClassification::Outcome::kDiscard:
        result.discards.push_back(
            MakeDiscard(s, profile, DiscardReason::kPairTooDifferent, verdict.detail));
        break;
    }
  }
}

}  // namespace

void PairHeuristicConfig::Validate() const {
  if (max_differing_words < 1) throw ConfigError("max_differing_words must be >= 1");
  if (!(qe_threshold >= 0.0 && qe_threshold <= 1.0)) {
    throw ConfigError("qe_threshold must lie in [0,1]");
  }
}

std::string_view ToString(UnsupportedQePolicy policy) {
  return policy == UnsupportedQePolicy::kSkipQe ? "skip-qe" : "discard-all";
}

std::optional<UnsupportedQePolicy> ParseUnsupportedQePolicy(std::string_view text) {
  if (text == "skip-qe") return UnsupportedQePolicy::kSkipQe;
  if (text == "discard-all") return UnsupportedQePolicy::kDiscardAll;
  return std::nullopt;
}

std::string_view ToString(DiscardReason reason) {
  switch (reason) {
    case DiscardReason::kQeBelowThreshold: return "qe-below-threshold";
    case DiscardReason::kNoQuotedSpan: return "no-quoted-span";
    case DiscardReason::kPairTooDifferent: return "pair-too-different";
    case DiscardReason::kTranslationFailed: return "translation-failed";
    case DiscardReason::kBackendUnsupported: return "backend-unsupported";
  }
  return "translation-failed";
}

std::optional<DiscardReason> ParseDiscardReason(std::string_view text) {
  for (DiscardReason r : kAllDiscardReasons) {
    if (ToString(r) == text) return r;
  }
  return std::nullopt;
}

json DiscardToJson(const DiscardRecord& r) {
  return json{{"schema_version", kDatasetSchemaVersion},
              {"source_id", r.source_id},
              {"lang", r.lang},
              {"reason", std::string(ToString(r.reason))},
              {"detail", r.detail},
              {"stereotype_id", r.stereotype_id}};
}

DiscardRecord DiscardFromJson(const json& record) {
  try {
    DiscardRecord r;
    r.source_id = record.at("source_id").get<std::string>();
    r.lang = record.at("lang").get<std::string>();
    const auto reason = ParseDiscardReason(record.at("reason").get<std::string>());
    if (!reason) throw DataError("unknown discard reason");
    r.reason = *reason;
    r.detail = record.value("detail", std::string());
    r.stereotype_id = record.value("stereotype_id", 0);
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed discard record: ") + e.what());
  }
}

std::string SerializeDiscards(std::span<const DiscardRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += DiscardToJson(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<DiscardRecord> ParseDiscards(std::string_view content) {
  std::vector<DiscardRecord> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    ++line_no;
    const auto line = Trim(content.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    try {
      out.push_back(DiscardFromJson(json::parse(line)));
    } catch (const json::exception& e) {
      throw DataError("discards line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<DiscardRecord> ReadDiscardDir(const std::filesystem::path& dir) {
  std::vector<DiscardRecord> out;
  if (!std::filesystem::is_directory(dir)) return out;
  std::vector<std::filesystem::path> files;
  for (const auto& item : std::filesystem::directory_iterator(dir)) {
    if (item.is_regular_file() && item.path().extension() == ".jsonl") files.push_back(item.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto part = ParseDiscards(ReadFile(f));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

PairClassification ClassifyPair(std::string_view masc_text, std::string_view fem_text,
                                const PairHeuristicConfig& config) {
  if (masc_text.empty() || fem_text.empty()) {
    throw InvalidArgument("ClassifyPair: empty text");
  }
  PairClassification result;
  const auto tokens_m = SplitWhitespace(masc_text);
  const auto tokens_f = SplitWhitespace(fem_text);
  if (tokens_m.size() != tokens_f.size()) {
    result.detail = "word counts differ (" + std::to_string(tokens_m.size()) + " vs " +
                    std::to_string(tokens_f.size()) + ")";
    return result;
  }
  const auto positions = DifferingPositions(tokens_m, tokens_f);
  if (positions.empty()) {
    result.outcome = PairClassification::Outcome::kNeutral;
    return result;
  }
  if (positions.size() > config.max_differing_words) {
    result.detail = std::to_string(positions.size()) + " words differ";
    return result;
  }
  for (std::size_t p : positions) {
    const std::size_t edits = Levenshtein(tokens_m[p], tokens_f[p]);
    if (edits > config.max_char_edit) {
      result.detail = "word " + std::to_string(p) + " differs by " + std::to_string(edits) +
                      " characters ('" + tokens_m[p] + "' vs '" + tokens_f[p] + "')";
      result.positions.clear();
      result.words.clear();
      result.char_edits.clear();
      return result;
    }
    result.positions.push_back(p);
    result.words.emplace_back(tokens_m[p], tokens_f[p]);
    result.char_edits.push_back(edits);
  }
  result.outcome = PairClassification::Outcome::kGendered;
  return result;
}

std::size_t ExpansionResult::CountKind(EntryKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [kind](const DatasetEntry& e) { return e.kind == kind; }));
}

std::size_t ExpansionResult::CountReason(DiscardReason reason) const {
  return static_cast<std::size_t>(
      std::count_if(discards.begin(), discards.end(),
                    [reason](const DiscardRecord& d) { return d.reason == reason; }));
}

json ExpansionResult::Tallies() const {
  json discarded = json::object();
  for (DiscardReason r : kAllDiscardReasons) discarded[std::string(ToString(r))] = CountReason(r);
  return json{{"gendered", CountKind(EntryKind::kGendered)},
              {"neutral", CountKind(EntryKind::kNeutral)},
              {"discarded", discarded},
              {"total", entries.size() + discards.size()}};
}

ExpansionResult ExpandLanguage(std::span<const SourceSentence> corpus,
                               const LanguageProfile& profile, TranslationClient& translator,
                               QeClient& qe, const ExpansionOptions& options) {
  options.heuristic.Validate();
  ValidateProfile(profile);
  ExpansionResult result;
  result.warnings = profile.warnings;
  if (profile.code == options.source_lang) {
    ExpandSourceLanguage(corpus, profile, result);
  } else if (!profile.gendered_morphology) {
    ExpandDirect(corpus, profile, translator, qe, options, result);
  } else {
    ExpandTemplated(corpus, profile, translator, qe, options, result);
  }
  return result;
}

}  // namespace stereoeval
