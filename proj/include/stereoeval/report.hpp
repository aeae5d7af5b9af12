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

// Structured report files (CSV + JSON) computed from a workspace:
//
//   <workspace>/dataset/*.jsonl, discards/*.jsonl, scores/<model>/*.jsonl
//     -> <workspace>/report/{stats,ranks,gs}/..., report/manifest.json
//
// Rendering is pure: each function returns file contents keyed by a path
// relative to the report directory, so `VerifyReport` can recompute and
// byte-compare without touching disk.

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "stereoeval/corpus.hpp"
#include "stereoeval/expansion.hpp"
#include "stereoeval/metrics.hpp"

namespace stereoeval {

using FileSet = std::map<std::string, std::string>;

// g_s averages within this distance of 1.0 are flagged "no-stereotyping".
inline constexpr double kNoStereotypingTolerance = 1e-9;
inline constexpr double kGsReference = 1.0;

// stats/dataset_stats.csv, stats/per_stereotype.csv, stats/summary.json.
// Always contains an ALL row, so an empty run yields an all-zero table.
FileSet RenderDatasetStats(std::span<const DatasetEntry> entries,
                           std::span<const DiscardRecord> discards);

// Languages x 16 masculine ranks, feminine stereotype columns first. Rows
// follow `languages`. Throws DataError when a language has no summary or
// its summary has no ranks; all summaries must share model and mode.
std::string RenderRankMatrix(std::span<const GroupSummary> summaries,
                             std::span<const std::string> languages);

// One row per (model, lang, mode, stereotype) with q, n, rank, inclination.
std::string RenderQScores(std::span<const GroupSummary> summaries);

std::string_view GsFlag(double mean_g_s);

// gs/gs.csv and gs/gs_averages.csv. Throws InvalidArgument when empty.
FileSet RenderGsReport(std::span<const GroupSummary> summaries);

struct ReportParameters {
  std::vector<int> proxy_feminine = FeminineStereotypeIds();
  std::vector<int> proxy_masculine = MasculineStereotypeIds();
  // lang -> warnings to surface in the manifest
  std::map<std::string, std::vector<std::string>> language_warnings;

  nlohmann::json ToJson() const;
  static ReportParameters FromJson(const nlohmann::json& j);
};

// Groups scores by (model, lang, mode). Duplicate (model, entry, mode)
// records keep the first occurrence.
std::vector<GroupSummary> SummarizeScores(std::span<const SentenceScore> scores,
                                          const ReportParameters& params);

struct ReportBuild {
  FileSet files;  // includes manifest.json
  std::vector<std::string> notes;
};

ReportBuild BuildReport(const std::filesystem::path& workspace, const ReportParameters& params);

// Replaces stats/, ranks/, gs/ and manifest.json; agreement/ is left alone.
void WriteReport(const std::filesystem::path& workspace, const ReportBuild& build);

// Recomputes from the inputs named in report/manifest.json (and from
// report/agreement/inputs.json when present) and byte-compares. Returns
// {"ok", "checked", "mismatches": [{"path", "problem"}]}.
nlohmann::json VerifyReport(const std::filesystem::path& workspace);

// Agreement outputs live in report/agreement/: the annotation CSV copy,
// inputs.json (options) and agreement.json.
struct AgreementInputs {
  std::string annotations_csv;
  AgreementOptions options;
};
FileSet RenderAgreement(const AgreementInputs& inputs);
AgreementInputs ReadAgreementInputs(const std::filesystem::path& agreement_dir);

}  // namespace stereoeval
