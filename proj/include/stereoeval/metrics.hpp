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

// Aggregate bias metrics over sentence scores, and agreement statistics for
// human validation of the generated data.
//
// For one (model, language, template mode) group:
//   q_i          mean r_masc over the sentences of stereotype i
//   rank         1 = largest q_i (most masculine), ties by ascending id
//   proxy        mean of (mean q over feminine ids, mean q over masculine ids)
//   inclination  proxy - q_i for feminine i, q_i - proxy for masculine i
//   g_s          mean q over masculine ids / mean q over feminine ids

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "stereoeval/corpus.hpp"
#include "stereoeval/scoring.hpp"

namespace stereoeval {

struct StereotypeQ {
  double q = 0.0;
  std::size_t n = 0;
};
using QMap = std::map<int, StereotypeQ>;

// All scores must share (model_id, lang, template_mode); otherwise throws
// InvalidArgument. Stereotypes without sentences are absent from the map.
QMap ComputeQScores(std::span<const SentenceScore> scores);

// Stereotype ids 1..16 that have no entry in `q`.
std::vector<int> MissingStereotypes(const QMap& q);

// Throws InvalidArgument listing the missing ids unless all 16 are present.
std::map<int, int> MasculineRank(const QMap& q);

// Throws InvalidArgument if either id set is empty or not contained in `q`.
double ProxyDefault(const QMap& q, std::span<const int> feminine_ids,
                    std::span<const int> masculine_ids);

// Uses each stereotype's gender from the taxonomy. Throws InvalidArgument
// when proxy lies outside [0,1].
std::map<int, double> Inclination(const QMap& q, double proxy);

struct StereotypeRate {
  double q_f = 0.0;
  double q_m = 0.0;
  double g_s = 0.0;
};

// Throws UndefinedError when the feminine mean is zero.
StereotypeRate ComputeStereotypeRate(const QMap& q, std::span<const int> feminine_ids,
                                     std::span<const int> masculine_ids);

struct StereotypeSummary {
  int stereotype_id = 0;
  double q = 0.0;
  std::size_t n = 0;
  std::optional<int> rank;  // present only when all 16 stereotypes are
  double inclination = 0.0;
};

struct ModelLanguageSummary {
  std::string model_id;
  std::string lang;
  TemplateMode template_mode = TemplateMode::kGenderedPair;
  double q_f = 0.0;
  double q_m = 0.0;
  double proxy_default = 0.0;
  double g_s = 0.0;
};

struct GroupSummary {
  ModelLanguageSummary overall;
  std::vector<StereotypeSummary> stereotypes;  // ascending id, present only
  std::vector<int> missing;
  std::vector<std::string> notes;
  bool rate_defined = true;
};

// Aggregates one group. Id sets are restricted to stereotypes present in the
// group; the exclusion is recorded in `notes`.
GroupSummary SummarizeGroup(std::span<const SentenceScore> scores,
                            std::span<const int> feminine_ids,
                            std::span<const int> masculine_ids);

// ---------------------------------------------------------------------------
// Agreement

struct PearsonResult {
  double rho = 0.0;
  double p = 1.0;  // two-sided permutation p-value
};

// Requires equal lengths >= 3 (InvalidArgument) and nonzero variance in both
// inputs (UndefinedError). The p-value is (1 + #{|rho_perm| >= |rho|}) /
// (1 + resamples) over seeded permutations of `ys`.
PearsonResult Pearson(std::span<const double> xs, std::span<const double> ys,
                      std::size_t resamples = 10000, std::uint64_t seed = 0);

// Cohen's kappa over categorical labels. nullopt when chance agreement is 1
// (both raters used one and the same category). Throws InvalidArgument on a
// length mismatch or empty input.
std::optional<double> CohenKappa(std::span<const std::string> a, std::span<const std::string> b);

enum class GenderLabel { kNeutral, kMasculine, kFeminine, kUnsure };
std::string_view ToString(GenderLabel label);
std::optional<GenderLabel> ParseGenderLabel(std::string_view text);

struct AnnotationRecord {
  std::string sentence_id;
  std::string annotator_id;
  int da_score = 0;  // 0..100
  GenderLabel gender_label = GenderLabel::kUnsure;
};

// Spreadsheet-exported CSV with a header naming sentence_id, annotator_id,
// da_score and gender_label (any order, extra columns ignored). Throws
// DataError naming the line on malformed rows.
std::vector<AnnotationRecord> ParseAnnotationCsv(std::string_view content);

struct AgreementOptions {
  std::size_t resamples = 10000;
  std::uint64_t seed = 0;
  // sentence_id -> label assigned by the pipeline, if known.
  std::map<std::string, GenderLabel> system_labels;
};

// Structured agreement report: per annotator DA means and system-label
// agreement, per annotator pair Pearson rho/p on DA scores and Cohen's kappa
// on labels, plus averages over pairs where the statistic is defined.
nlohmann::json ComputeAgreement(std::span<const AnnotationRecord> records,
                                const AgreementOptions& options);

// ---------------------------------------------------------------------------
// Sampling

// Seeded uniform integer in [0, bound), identical across platforms.
std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t bound);

// Stratified sample preserving the gendered/neutral proportion of `dataset`
// (rounded to nearest), returned in dataset order. Throws InvalidArgument
// when the dataset is empty or n exceeds its size.
std::vector<DatasetEntry> SampleValidationBatch(std::span<const DatasetEntry> dataset,
                                                std::size_t n, std::uint64_t seed);

}  // namespace stereoeval
