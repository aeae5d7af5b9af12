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

#include "stereoeval/scoring.hpp"

#include <cmath>

#include "stereoeval/error.hpp"
#include "stereoeval/util.hpp"

namespace stereoeval {

namespace {

using nlohmann::json;

// logistic(x) for x >= 0; the result lies in [0.5, 1].
double LogisticNonNegative(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double AverageLogLikelihood(const TokenLogprobs& tl) {
  if (tl.logprobs.empty()) throw InvalidArgument("AverageLogLikelihood: no tokens");
  double sum = 0.0;
  for (double lp : tl.logprobs) sum += lp;
  return sum / static_cast<double>(tl.logprobs.size());
}

double RelativeMasculineLikelihood(double ll_masc, double ll_fem) {
  if (!std::isfinite(ll_masc) || !std::isfinite(ll_fem)) {
    throw InvalidArgument("RelativeMasculineLikelihood: non-finite input");
  }
  const double x = ll_masc - ll_fem;
  // Negative arguments reuse the positive branch; 1 - q is exact for
  // q in [0.5, 1], which makes the swap identity hold bit-for-bit.
  if (x >= 0.0) return LogisticNonNegative(x);
  return 1.0 - LogisticNonNegative(-x);
}

json ScoreToJson(const SentenceScore& s) {
  return json{{"schema_version", kDatasetSchemaVersion},
              {"entry_id", s.entry_id},
              {"model_id", s.model_id},
              {"lang", s.lang},
              {"stereotype_id", s.stereotype_id},
              {"template_mode", std::string(ToString(s.template_mode))},
              {"ll_masc", s.ll_masc},
              {"ll_fem", s.ll_fem},
              {"tokens_masc", s.tokens_masc},
              {"tokens_fem", s.tokens_fem},
              {"r_masc", s.r_masc},
              {"backend", s.backend}};
}

SentenceScore ScoreFromJson(const json& record) {
  try {
    SentenceScore s;
    s.entry_id = record.at("entry_id").get<std::string>();
    s.model_id = record.at("model_id").get<std::string>();
    s.lang = record.at("lang").get<std::string>();
    s.stereotype_id = record.at("stereotype_id").get<int>();
    const auto mode = ParseTemplateMode(record.at("template_mode").get<std::string>());
    if (!mode) throw DataError("unknown template_mode");
    s.template_mode = *mode;
    s.ll_masc = record.at("ll_masc").get<double>();
    s.ll_fem = record.at("ll_fem").get<double>();
    s.tokens_masc = record.at("tokens_masc").get<std::size_t>();
    s.tokens_fem = record.at("tokens_fem").get<std::size_t>();
    s.r_masc = record.at("r_masc").get<double>();
    s.backend = record.value("backend", json::object());
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed score record: ") + e.what());
  }
}

std::string SerializeScores(std::span<const SentenceScore> scores) {
  std::string out;
  for (const auto& s : scores) {
    out += ScoreToJson(s).dump();
    out += '\n';
  }
  return out;
}

std::vector<SentenceScore> ParseScores(std::string_view content) {
  std::vector<SentenceScore> out;
  std::size_t start = 0, line_no = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    ++line_no;
    const auto line = Trim(content.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    try {
      out.push_back(ScoreFromJson(json::parse(line)));
    } catch (const json::exception& e) {
      throw DataError("scores line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::pair<std::string, std::string> ScoringTexts(const DatasetEntry& entry, TemplateMode mode,
                                                 const LanguageProfile& profile) {
  if (entry.kind == EntryKind::kGendered) {
    if (mode != TemplateMode::kGenderedPair) {
      throw InvalidArgument("gendered entry '" + entry.entry_id + "' must be scored as a pair");
    }
    return {entry.masc_text, entry.fem_text};
  }
  if (mode == TemplateMode::kGenderedPair) {
    throw InvalidArgument("neutral entry '" + entry.entry_id + "' needs a noun or pronoun template");
  }
  return {WrapFinal(entry.masc_text, Gender::kMasculine, mode, profile),
          WrapFinal(entry.fem_text, Gender::kFeminine, mode, profile)};
}

SentenceScore MakeSentenceScore(const DatasetEntry& entry, const std::string& model_id,
                                TemplateMode mode, const TokenLogprobs& masc,
                                const TokenLogprobs& fem, json backend) {
  SentenceScore s;
  s.entry_id = entry.entry_id;
  s.model_id = model_id;
  s.lang = entry.lang;
  s.stereotype_id = entry.stereotype_id;
  s.template_mode = mode;
  s.ll_masc = AverageLogLikelihood(masc);
  s.ll_fem = AverageLogLikelihood(fem);
  s.tokens_masc = masc.tokens.size();
  s.tokens_fem = fem.tokens.size();
  s.r_masc = RelativeMasculineLikelihood(s.ll_masc, s.ll_fem);
  s.backend = std::move(backend);
  return s;
}

ItemResult<SentenceScore> ScoreEntry(const DatasetEntry& entry, const ModelRef& model,
                                     TemplateMode mode, const LanguageProfile& profile,
                                     ScoringClient& scorer) {
  auto run = ScoreEntries(std::span(&entry, 1), model, mode, profile, scorer);
  if (!run.scores.empty()) return ItemResult<SentenceScore>::Ok(std::move(run.scores.front()));
  if (!run.skipped.empty()) {
    return ItemResult<SentenceScore>::Fail(ErrorCode::kBackend, run.skipped.front().reason);
  }
  throw InvalidArgument("entry '" + entry.entry_id + "' does not apply to mode " +
                        std::string(ToString(mode)));
}

ScoreRun ScoreEntries(std::span<const DatasetEntry> entries, const ModelRef& model,
                      std::optional<TemplateMode> mode, const LanguageProfile& profile,
                      ScoringClient& scorer) {
  if (mode == TemplateMode::kPronoun && !profile.pronoun_templates_available) {
    throw ConfigError("language '" + profile.code + "' has no usable gendered pronoun templates");
  }
  const TemplateMode neutral_mode = mode.value_or(SelectTemplateMode(profile));

  struct Job {
    const DatasetEntry* entry;
    TemplateMode mode;
  };
  std::vector<Job> jobs;
  std::vector<std::string> texts;
  for (const auto& entry : entries) {
    TemplateMode m;
    if (entry.kind == EntryKind::kGendered) {
      if (mode && *mode != TemplateMode::kGenderedPair) continue;
      m = TemplateMode::kGenderedPair;
    } else {
      if (mode == TemplateMode::kGenderedPair) continue;
      m = neutral_mode;
    }
    auto [masc, fem] = ScoringTexts(entry, m, profile);
    jobs.push_back({&entry, m});
    texts.push_back(std::move(masc));
    texts.push_back(std::move(fem));
  }

  ScoreRun run;
  if (jobs.empty()) return run;
  const auto results = scorer.ScoreBatch(texts, model);
  const json backend = scorer.Describe();
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto& m = results[2 * j];
    const auto& f = results[2 * j + 1];
    if (!m.ok() || !f.ok()) {
      run.skipped.push_back({jobs[j].entry->entry_id, m.ok() ? f.error : m.error});
      continue;
    }
    run.scores.push_back(
        MakeSentenceScore(*jobs[j].entry, model.model_id, jobs[j].mode, *m.value, *f.value, backend));
  }
  return run;
}

}  // namespace stereoeval
