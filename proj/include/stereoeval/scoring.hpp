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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "stereoeval/backends.hpp"
#include "stereoeval/corpus.hpp"
#include "stereoeval/templating.hpp"

namespace stereoeval {

// Mean natural-log probability per token. Throws InvalidArgument when empty.
double AverageLogLikelihood(const TokenLogprobs& tl);

// Relative likelihood of the masculine variant: logistic(ll_masc - ll_fem).
// Swapping the arguments gives exactly 1 - r. Throws InvalidArgument for
// non-finite input.
double RelativeMasculineLikelihood(double ll_masc, double ll_fem);

struct SentenceScore {
  std::string entry_id;
  std::string model_id;
  std::string lang;
  int stereotype_id = 0;
  TemplateMode template_mode = TemplateMode::kGenderedPair;
  double ll_masc = 0.0;
  double ll_fem = 0.0;
  std::size_t tokens_masc = 0;
  std::size_t tokens_fem = 0;
  double r_masc = 0.5;
  nlohmann::json backend = nlohmann::json::object();

  bool operator==(const SentenceScore&) const = default;
};

nlohmann::json ScoreToJson(const SentenceScore& score);
SentenceScore ScoreFromJson(const nlohmann::json& record);
std::string SerializeScores(std::span<const SentenceScore> scores);
std::vector<SentenceScore> ParseScores(std::string_view content);

// Both variants an entry is scored on. Gendered entries require
// kGendered pair mode and are scored as-is; neutral entries require noun or
// pronoun mode and are wrapped in the sentence-final templates. Violations
// throw InvalidArgument (wrong mode for the kind) or ConfigError (pronoun
// mode without pronoun templates).
std::pair<std::string, std::string> ScoringTexts(const DatasetEntry& entry, TemplateMode mode,
                                                 const LanguageProfile& profile);

// Builds the score from already-obtained log-probabilities.
SentenceScore MakeSentenceScore(const DatasetEntry& entry, const std::string& model_id,
                                TemplateMode mode, const TokenLogprobs& masc,
                                const TokenLogprobs& fem, nlohmann::json backend);

struct SkippedEntry {
  std::string entry_id;
  std::string reason;
};

struct ScoreRun {
  std::vector<SentenceScore> scores;
  std::vector<SkippedEntry> skipped;
};

ItemResult<SentenceScore> ScoreEntry(const DatasetEntry& entry, const ModelRef& model,
                                     TemplateMode mode, const LanguageProfile& profile,
                                     ScoringClient& scorer);

// `mode` nullopt means auto: gendered entries as pairs, neutral entries in
// the profile's preferred template mode. An explicit mode scores only the
// entries it applies to.
ScoreRun ScoreEntries(std::span<const DatasetEntry> entries, const ModelRef& model,
                      std::optional<TemplateMode> mode, const LanguageProfile& profile,
                      ScoringClient& scorer);

}  // namespace stereoeval
