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

// Subcommand implementations shared by the C API and the command line.
// Every command reads and writes inside the configured workspace:
//
//   dataset/<lang>.jsonl        discards/<lang>.jsonl
//   manifests/expand-<lang>.json
//   validation/<lang>.jsonl     validation/<lang>.csv
//   scores/<model>/<lang>__<mode>.jsonl
//   report/{stats,ranks,gs,agreement}/..., report/manifest.json
//   cache/<kind>.jsonl          (unless cache_dir is set)

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "stereoeval/config.hpp"
#include "stereoeval/metrics.hpp"

namespace stereoeval {

struct CommandOptions {
  std::vector<std::string> languages;  // empty: all configured (or present) languages
  std::vector<std::string> models;     // empty: all configured models
  std::string mode = "auto";           // gendered-pair | noun | pronoun | auto
  std::optional<std::size_t> sample_size;
  std::optional<std::filesystem::path> annotations;
  std::optional<std::filesystem::path> validation_sample;
};

enum class Outcome {
  kOk,
  kPartial,   // outputs written, but some backend items failed
  kMismatch,  // verify found differences
};

struct CommandResult {
  Outcome outcome = Outcome::kOk;
  nlohmann::json summary;
};

inline const std::vector<std::string>& CommandNames() {
  static const std::vector<std::string> names = {
      "expand", "stats", "sample-validation", "agreement", "score", "report", "verify"};
  return names;
}

CommandResult RunExpand(const Config& config, const CommandOptions& options);
CommandResult RunStats(const Config& config, const CommandOptions& options);
CommandResult RunSampleValidation(const Config& config, const CommandOptions& options);
CommandResult RunAgreement(const Config& config, const CommandOptions& options);
CommandResult RunScore(const Config& config, const CommandOptions& options);
CommandResult RunReport(const Config& config, const CommandOptions& options);
CommandResult RunVerify(const Config& config, const CommandOptions& options);

// Dispatches by name; throws InvalidArgument for an unknown command.
CommandResult RunCommand(const std::string& name, const Config& config,
                         const CommandOptions& options);

// Labels the pipeline assigns to each annotated variant of a validation
// sample: "<entry_id>" for neutral entries, "<entry_id>#m" and
// "<entry_id>#f" for the two sides of a gendered pair.
std::map<std::string, GenderLabel> SystemLabels(std::span<const DatasetEntry> sample);

}  // namespace stereoeval
