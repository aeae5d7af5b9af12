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
// Command-line front end over the C interface.

#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stereoeval.h"

namespace {

constexpr int kExitUsage = 2;

int ExitCode(se_status status) {
  switch (status) {
    case SE_OK: return 0;
    case SE_INVALID_ARGUMENT: return kExitUsage;
    case SE_CONFIG:
    case SE_UNSUPPORTED: return 3;
    case SE_IO: return 4;
    case SE_BACKEND: return 5;
    case SE_MISMATCH: return 6;
    case SE_DATA:
    case SE_UNDEFINED: return 7;
    case SE_INTERNAL: return 70;
  }
  return 70;
}

int ReportError(const std::string& status, int exit_code, const std::string& message,
                const std::string& command) {
  nlohmann::json error = {{"error",
                           {{"status", status},
                            {"exit_code", exit_code},
                            {"command", command},
                            {"message", message}}}};
  std::cerr << error.dump() << "\n";
  return exit_code;
}

int Fail(se_status status, const std::string& command) {
  return ReportError(se_status_name(status), ExitCode(status), se_last_error(), command);
}

struct Flags {
  std::optional<std::string> config;
  std::vector<std::string> langs;
  std::vector<std::string> models;
  std::optional<std::string> mode;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> cache_dir;
  std::optional<std::size_t> max_inflight;
  std::optional<std::size_t> sample;
  std::optional<std::string> annotations;
  std::optional<std::string> validation_sample;
};

int Run(const std::string& command, const Flags& f) {
  se_config* config = nullptr;
  se_status status = f.config ? se_config_load(f.config->c_str(), &config) : se_config_new(&config);
  if (status != SE_OK) return Fail(status, command);
  std::unique_ptr<se_config, decltype(&se_config_free)> config_guard(config, se_config_free);

  se_options* options = nullptr;
  if ((status = se_options_new(&options)) != SE_OK) return Fail(status, command);
  std::unique_ptr<se_options, decltype(&se_options_free)> options_guard(options, se_options_free);

  auto check = [&](se_status s) {
    if (s != SE_OK) status = s;
    return s == SE_OK;
  };
  bool ok = true;
  if (f.out) ok = ok && check(se_config_set_workspace(config, f.out->c_str()));
  if (f.seed) ok = ok && check(se_config_set_seed(config, *f.seed));
  if (f.cache_dir) ok = ok && check(se_config_set_cache_dir(config, f.cache_dir->c_str()));
  if (f.max_inflight) ok = ok && check(se_config_set_max_inflight(config, *f.max_inflight));
  for (const auto& lang : f.langs) ok = ok && check(se_options_add_language(options, lang.c_str()));
  for (const auto& m : f.models) ok = ok && check(se_options_add_model(options, m.c_str()));
  if (f.mode) ok = ok && check(se_options_set_mode(options, f.mode->c_str()));
  if (f.sample) ok = ok && check(se_options_set_sample_size(options, *f.sample));
  if (f.annotations) ok = ok && check(se_options_set_annotations(options, f.annotations->c_str()));
  if (f.validation_sample) {
    ok = ok && check(se_options_set_validation_sample(options, f.validation_sample->c_str()));
  }
  if (!ok) return Fail(status, command);

  char* summary = nullptr;
  status = se_run(config, command.c_str(), options, &summary);
  if (summary != nullptr) {
    std::cout << nlohmann::json::parse(summary).dump(2) << "\n";
    se_free_string(summary);
  }
  return status == SE_OK ? 0 : Fail(status, command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gender-stereotype benchmark construction and evaluation"};
  app.set_version_flag("--version", std::string(se_version()));
  app.require_subcommand(1, 1);

  Flags f;
  app.add_option("--config", f.config, "JSON configuration file");
  app.add_option("--lang", f.langs, "Language code (repeatable)");
  app.add_option("--model", f.models, "Model id from the config (repeatable)");
  app.add_option("--mode", f.mode, "Template mode for score")
      ->check(CLI::IsMember({"gendered-pair", "noun", "pronoun", "auto"}));
  app.add_option("--out", f.out, "Workspace directory (overrides the config)");
  app.add_option("--seed", f.seed, "Random seed (overrides the config)");
  app.add_option("--cache-dir", f.cache_dir, "Backend response cache directory");
  app.add_option("--max-inflight", f.max_inflight, "Concurrent backend requests")
      ->check(CLI::PositiveNumber);
  app.add_option("--sample", f.sample, "Validation batch size per language");
  app.add_option("--annotations", f.annotations, "Annotation CSV for agreement");
  app.add_option("--validation-sample", f.validation_sample,
                 "Validation JSONL whose entries provide system labels for agreement");

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"expand", "Build gendered and neutral datasets for the configured languages"},
      {"stats", "Write dataset statistics"},
      {"sample-validation", "Draw a stratified annotation batch"},
      {"agreement", "Inter-annotator agreement from annotation CSVs"},
      {"score", "Score dataset entries with the configured models"},
      {"report", "Aggregate scores and write the report directory"},
      {"verify", "Recompute the report and compare byte-for-byte"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return ReportError("usage", kExitUsage, e.what(), "");
  }
  return Run(app.get_subcommands().front()->get_name(), f);
}
