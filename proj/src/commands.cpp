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
#include "stereoeval/commands.hpp"

#include <algorithm>

#include "stereoeval/csv.hpp"
#include "stereoeval/error.hpp"
#include "stereoeval/metrics.hpp"
#include "stereoeval/report.hpp"
#include "stereoeval/scoring.hpp"
#include "stereoeval/util.hpp"

namespace stereoeval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& Workspace(const Config& config) {
  if (config.workspace.empty()) {
    throw ConfigError("no workspace configured (set 'workspace' or pass --out)");
  }
  return config.workspace;
}

std::string Rel(const fs::path& workspace, const fs::path& path) {
  return fs::relative(path, workspace).generic_string();
}

std::vector<std::string> ExpandLanguages(const Config& config, const CommandOptions& options) {
  std::vector<std::string> langs = options.languages.empty() ? config.languages : options.languages;
  if (langs.empty()) throw ConfigError("no languages selected (config 'languages' or --lang)");
  for (const auto& lang : langs) config.registry.Get(lang);
  return langs;
}

// Requested languages, or every language present in `by_lang`.
std::vector<std::string> DatasetLanguages(const DatasetReadResult& data,
                                          const CommandOptions& options) {
  if (!options.languages.empty()) return options.languages;
  std::vector<std::string> out;
  for (const auto& [lang, _] : data.by_lang) out.push_back(lang);
  return out;
}

std::optional<TemplateMode> ParseModeOption(const std::string& text) {
  if (text == "auto") return std::nullopt;
  const auto mode = ParseTemplateMode(text);
  if (!mode) {
    throw InvalidArgument("--mode must be gendered-pair, noun, pronoun or auto (got '" + text + "')");
  }
  return mode;
}

json RejectionsJson(const DatasetReadResult& data) {
  json out = json::array();
  for (const auto& r : data.rejections) out.push_back(r);
  return out;
}

}  // namespace

std::map<std::string, GenderLabel> SystemLabels(std::span<const DatasetEntry> sample) {
  std::map<std::string, GenderLabel> labels;
  for (const auto& e : sample) {
    if (e.kind == EntryKind::kNeutral) {
      labels[e.entry_id] = GenderLabel::kNeutral;
    } else {
      labels[e.entry_id + "#m"] = GenderLabel::kMasculine;
      labels[e.entry_id + "#f"] = GenderLabel::kFeminine;
    }
  }
  return labels;
}

CommandResult RunExpand(const Config& config, const CommandOptions& options) {
  const fs::path& ws = Workspace(config);
  if (!config.source_corpus) throw ConfigError("expand requires 'source_corpus'");
  if (!config.translate_backend || !config.qe_backend) {
    throw ConfigError("expand requires backends.translate and backends.qe");
  }
  const auto langs = ExpandLanguages(config, options);
  const CorpusLoadResult corpus = LoadSourceCorpus(*config.source_corpus);
  const std::string corpus_sha = Sha256Hex(ReadFile(*config.source_corpus));

  auto cache = std::make_shared<ResponseCache>(config.CacheDir());
  TranslationClient translator(MakeTranslationProvider(*config.translate_backend), cache,
                               ClientOptionsFromJson(*config.translate_backend, config.max_inflight));
  QeClient qe(MakeQeProvider(*config.qe_backend), cache,
              ClientOptionsFromJson(*config.qe_backend, config.max_inflight));

  CommandResult result;
  json per_lang = json::object();
  json outputs = json::array();
  for (const auto& lang : langs) {
    const LanguageProfile& profile = config.registry.Get(lang);
    ExpansionResult run = ExpandLanguage(corpus.sentences, profile, translator, qe, config.expansion);
    if (run.entries.size() + run.discards.size() != corpus.sentences.size()) {
      throw std::logic_error("expansion lost sentences for " + lang);
    }
    const fs::path dataset = ws / "dataset" / (lang + ".jsonl");
    const fs::path discards = ws / "discards" / (lang + ".jsonl");
    const fs::path manifest = ws / "manifests" / ("expand-" + lang + ".json");
    WriteDataset(run.entries, dataset);
    WriteFileAtomic(discards, SerializeDiscards(run.discards));

    const json tallies = run.Tallies();
    json m = {{"schema_version", kDatasetSchemaVersion},
              {"lang", lang},
              {"profile", ProfileToJson(profile)},
              {"config", config.Describe()},
              {"source_corpus",
               {{"sha256", corpus_sha},
                {"sentences", corpus.sentences.size()},
                {"warnings", corpus.warnings}}},
              {"backends", {{"translate", translator.ProviderId()}, {"qe", qe.ProviderId()}}},
              {"cache_digest", cache->Digest()},
              {"tallies", tallies},
              {"warnings", run.warnings}};
    WriteFileAtomic(manifest, m.dump(2) + "\n");
    if (run.CountReason(DiscardReason::kTranslationFailed) > 0) result.outcome = Outcome::kPartial;
    per_lang[lang] = {{"tallies", tallies}, {"warnings", run.warnings}};
    for (const auto& p : {dataset, discards, manifest}) outputs.push_back(Rel(ws, p));
  }
  result.summary = {{"command", "expand"},
                    {"languages", per_lang},
                    {"source_sentences", corpus.sentences.size()},
                    {"outputs", outputs}};
  return result;
}

CommandResult RunStats(const Config& config, const CommandOptions& options) {
  const fs::path& ws = Workspace(config);
  const auto data = ReadDatasetDir(ws / "dataset");
  const auto discards = ReadDiscardDir(ws / "discards");
  const FileSet files = RenderDatasetStats(data.entries, discards);
  for (const auto& [path, content] : files) WriteFileAtomic(ws / "report" / path, content);

  json summary = json::parse(files.at("stats/summary.json"));
  if (!options.languages.empty()) {
    json selected = json::object();
    for (const auto& lang : options.languages) {
      if (!summary["languages"].contains(lang)) throw DataError("no dataset for language '" + lang + "'");
      selected[lang] = summary["languages"][lang];
    }
    summary["languages"] = selected;
  }
  json outputs = json::array();
  for (const auto& [path, _] : files) outputs.push_back("report/" + path);
  return {Outcome::kOk,
          {{"command", "stats"},
           {"stats", summary},
           {"rejected_lines", RejectionsJson(data)},
           {"outputs", outputs}}};
}

CommandResult RunSampleValidation(const Config& config, const CommandOptions& options) {
  const fs::path& ws = Workspace(config);
  const auto data = ReadDatasetDir(ws / "dataset");
  const auto langs = DatasetLanguages(data, options);
  const std::size_t n = options.sample_size.value_or(config.validation_sample_size);

  json per_lang = json::object();
  json outputs = json::array();
  for (const auto& lang : langs) {
    auto it = data.by_lang.find(lang);
    if (it == data.by_lang.end()) throw DataError("no dataset for language '" + lang + "'");
    const auto sample = SampleValidationBatch(it->second, n, config.seed);

    std::string sheet = CsvLine({"sentence_id", "text", "annotator_id", "da_score", "gender_label"});
    std::size_t gendered = 0;
    for (const auto& e : sample) {
      if (e.kind == EntryKind::kGendered) {
        ++gendered;
        sheet += CsvLine({e.entry_id + "#m", e.masc_text, "", "", ""});
        sheet += CsvLine({e.entry_id + "#f", e.fem_text, "", "", ""});
      } else {
        sheet += CsvLine({e.entry_id, e.masc_text, "", "", ""});
      }
    }
    const fs::path jsonl = ws / "validation" / (lang + ".jsonl");
    const fs::path csv = ws / "validation" / (lang + ".csv");
    WriteDataset(sample, jsonl);
    WriteFileAtomic(csv, sheet);
    per_lang[lang] = {{"sampled", sample.size()},
                      {"gendered", gendered},
                      {"neutral", sample.size() - gendered},
                      {"population", it->second.size()}};
    outputs.push_back(Rel(ws, jsonl));
    outputs.push_back(Rel(ws, csv));
  }
  return {Outcome::kOk,
          {{"command", "sample-validation"},
           {"seed", config.seed},
           {"languages", per_lang},
           {"outputs", outputs}}};
}

CommandResult RunAgreement(const Config& config, const CommandOptions& options) {
  const fs::path& ws = Workspace(config);
  if (!options.annotations) throw InvalidArgument("agreement requires --annotations <csv>");
  AgreementInputs inputs;
  inputs.annotations_csv = ReadFile(*options.annotations);
  inputs.options.resamples = config.pearson_resamples;
  inputs.options.seed = config.seed;
  if (options.validation_sample) {
    const auto sample = ReadDataset(*options.validation_sample);
    inputs.options.system_labels = SystemLabels(sample.entries);
  }
  const FileSet files = RenderAgreement(inputs);
  json outputs = json::array();
  for (const auto& [path, content] : files) {
    WriteFileAtomic(ws / "report" / path, content);
    outputs.push_back("report/" + path);
  }
  return {Outcome::kOk,
          {{"command", "agreement"},
           {"agreement", json::parse(files.at("agreement/agreement.json"))},
           {"outputs", outputs}}};
}

CommandResult RunScore(const Config& config, const CommandOptions& options) {
  const fs::path& ws = Workspace(config);
  const auto mode = ParseModeOption(options.mode);
  if (config.models.empty()) throw ConfigError("score requires at least one entry in 'models'");
  std::vector<std::string> model_ids = options.models;
  if (model_ids.empty()) {
    for (const auto& m : config.models) model_ids.push_back(m.at("id").get<std::string>());
  }
  for (const auto& id : model_ids) config.Model(id);

  const auto data = ReadDatasetDir(ws / "dataset");
  const auto langs = DatasetLanguages(data, options);
  // Refuse up front so nothing is written for an invalid request.
  for (const auto& lang : langs) {
    const auto& profile = config.registry.Get(lang);
    if (mode == TemplateMode::kPronoun && !profile.pronoun_templates_available) {
      throw ConfigError("pronoun templates are not available for '" + lang +
                        "'; use --mode noun or gendered-pair");
    }
    if (!data.by_lang.contains(lang)) throw DataError("no dataset for language '" + lang + "'");
  }

  auto cache = std::make_shared<ResponseCache>(config.CacheDir());
  CommandResult result;
  json runs = json::array();
  json outputs = json::array();
  for (const auto& id : model_ids) {
    const json& spec = config.Model(id);
    ScoringClient scorer(MakeScoringProvider(spec), cache,
                         ClientOptionsFromJson(spec, config.max_inflight));
    ModelRef model{id, spec.value("endpoint", ""), spec.value("params", json::object())};
    for (const auto& lang : langs) {
      const auto& profile = config.registry.Get(lang);
      const ScoreRun run = ScoreEntries(data.by_lang.at(lang), model, mode, profile, scorer);
      const fs::path out = ws / "scores" / SanitizeFileComponent(id) /
                           (lang + "__" + options.mode + ".jsonl");
      WriteFileAtomic(out, SerializeScores(run.scores));
      json skipped = json::array();
      for (const auto& s : run.skipped) {
        skipped.push_back({{"entry_id", s.entry_id}, {"reason", s.reason}});
      }
      if (!run.skipped.empty()) result.outcome = Outcome::kPartial;
      runs.push_back({{"model", id},
                      {"lang", lang},
                      {"mode", options.mode},
                      {"scored", run.scores.size()},
                      {"skipped", skipped}});
      outputs.push_back(Rel(ws, out));
    }
  }
  result.summary = {{"command", "score"}, {"runs", runs}, {"outputs", outputs}};
  return result;
}

CommandResult RunReport(const Config& config, const CommandOptions&) {
  const fs::path& ws = Workspace(config);
  ReportParameters params;
  params.proxy_feminine = config.proxy_feminine;
  params.proxy_masculine = config.proxy_masculine;
  const fs::path dataset_dir = ws / "dataset";
  if (fs::is_directory(dataset_dir)) {
    for (const auto& [lang, _] : ReadDatasetDir(dataset_dir).by_lang) {
      if (!config.registry.Contains(lang)) continue;
      const auto& warnings = config.registry.Get(lang).warnings;
      if (!warnings.empty()) params.language_warnings[lang] = warnings;
    }
  }
  const ReportBuild build = BuildReport(ws, params);
  WriteReport(ws, build);
  json outputs = json::array();
  for (const auto& [path, _] : build.files) outputs.push_back("report/" + path);
  return {Outcome::kOk,
          {{"command", "report"}, {"notes", build.notes}, {"outputs", outputs}}};
}

CommandResult RunVerify(const Config& config, const CommandOptions&) {
  json verdict = VerifyReport(Workspace(config));
  const bool ok = verdict.at("ok").get<bool>();
  verdict["command"] = "verify";
  return {ok ? Outcome::kOk : Outcome::kMismatch, verdict};
}

CommandResult RunCommand(const std::string& name, const Config& config,
                         const CommandOptions& options) {
  if (name == "expand") return RunExpand(config, options);
  if (name == "stats") return RunStats(config, options);
  if (name == "sample-validation") return RunSampleValidation(config, options);
  if (name == "agreement") return RunAgreement(config, options);
  if (name == "score") return RunScore(config, options);
  if (name == "report") return RunReport(config, options);
  if (name == "verify") return RunVerify(config, options);
  throw InvalidArgument("unknown command '" + name + "'");
}

}  // namespace stereoeval
