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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stereoeval/expansion.hpp"
#include "stereoeval/templating.hpp"

namespace stereoeval {

// Environment variables that override backend settings from the file.
inline constexpr const char* kEnvTranslateUrl = "STEREOEVAL_TRANSLATE_URL";
inline constexpr const char* kEnvQeUrl = "STEREOEVAL_QE_URL";
inline constexpr const char* kEnvScoreUrl = "STEREOEVAL_SCORE_URL";
inline constexpr const char* kEnvApiKey = "STEREOEVAL_API_KEY";

using EnvMap = std::map<std::string, std::string>;

// Values of the variables above that are set in the process environment.
EnvMap ReadEnvironment();

struct Config {
  std::filesystem::path workspace;  // empty until given by file or --out
  std::optional<std::filesystem::path> source_corpus;
  std::string source_lang = "en";
  std::vector<std::string> languages;
  ProfileRegistry registry = ProfileRegistry::Builtin();
  ExpansionOptions expansion;
  std::vector<int> proxy_feminine = FeminineStereotypeIds();
  std::vector<int> proxy_masculine = MasculineStereotypeIds();
  std::optional<nlohmann::json> translate_backend;
  std::optional<nlohmann::json> qe_backend;
  std::vector<nlohmann::json> models;  // each has a unique "id" and a "kind"
  std::size_t max_inflight = 4;
  std::optional<std::filesystem::path> cache_dir;  // default <workspace>/cache
  std::uint64_t seed = 0;
  std::size_t pearson_resamples = 10000;
  std::size_t validation_sample_size = 100;

  std::filesystem::path CacheDir() const;
  const nlohmann::json& Model(const std::string& id) const;
  // Backend settings with credentials removed, for manifests.
  nlohmann::json Describe() const;
};

// Relative paths in the document resolve against base_dir. Unknown keys
// and invalid values throw ConfigError.
Config ParseConfig(const nlohmann::json& document, const std::filesystem::path& base_dir,
                   const EnvMap& env);
Config LoadConfig(const std::filesystem::path& path, const EnvMap& env);

struct ConfigOverrides {
  std::optional<std::filesystem::path> workspace;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::size_t> max_inflight;
};

void ApplyOverrides(Config& config, const ConfigOverrides& overrides);

}  // namespace stereoeval
