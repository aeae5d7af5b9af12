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
#include "stereoeval/report.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "stereoeval/csv.hpp"
#include "stereoeval/error.hpp"
#include "stereoeval/util.hpp"

namespace stereoeval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kAllLanguages = "ALL";

std::string Num(double v) { return FormatDouble(v); }
std::string Num(std::size_t v) { return std::to_string(v); }

std::string DumpJson(const json& j) { return j.dump(2) + "\n"; }

std::vector<int> StereotypeColumns() {
  auto ids = FeminineStereotypeIds();
  const auto masc = MasculineStereotypeIds();
  ids.insert(ids.end(), masc.begin(), masc.end());
  return ids;
}

struct LangCounts {
  std::size_t gendered = 0, neutral = 0, discarded = 0;
  std::map<DiscardReason, std::size_t> by_reason;
  std::array<std::size_t, kStereotypeCount> st_gendered{}, st_neutral{}, st_discarded{};
};

void CountEntry(LangCounts& c, const DatasetEntry& e) {
  const bool gendered = e.kind == EntryKind::kGendered;
  (gendered ? c.gendered : c.neutral)++;
  if (IsValidStereotypeId(e.stereotype_id)) {
    (gendered ? c.st_gendered : c.st_neutral)[e.stereotype_id - 1]++;
  }
}

void CountDiscard(LangCounts& c, const DiscardRecord& d) {
  c.discarded++;
  c.by_reason[d.reason]++;
  if (IsValidStereotypeId(d.stereotype_id)) c.st_discarded[d.stereotype_id - 1]++;
}

json CountsToJson(const LangCounts& c) {
  json reasons = json::object();
  for (auto r : kAllDiscardReasons) {
    auto it = c.by_reason.find(r);
    reasons[std::string(ToString(r))] = it == c.by_reason.end() ? 0 : it->second;
  }
  return json{{"gendered", c.gendered},
              {"neutral", c.neutral},
              {"discarded", c.discarded},
              {"discarded_by_reason", reasons},
              {"total", c.gendered + c.neutral + c.discarded}};
}

using GroupKey = std::tuple<std::string, std::string, std::string>;  // model, mode, lang

GroupKey KeyOf(const GroupSummary& s) {
  return {s.overall.model_id, std::string(ToString(s.overall.template_mode)), s.overall.lang};
}

std::vector<std::string> ListInputs(const fs::path& workspace) {
  std::vector<std::string> out;
  for (const char* sub : {"dataset", "discards"}) {
    const fs::path dir = workspace / sub;
    if (!fs::is_directory(dir)) continue;
    for (const auto& item : fs::directory_iterator(dir)) {
      if (item.is_regular_file() && item.path().extension() == ".jsonl") {
        out.push_back(fs::relative(item.path(), workspace).generic_string());
      }
    }
  }
  const fs::path scores = workspace / "scores";
  if (fs::is_directory(scores)) {
    for (const auto& item : fs::recursive_directory_iterator(scores)) {
      if (item.is_regular_file() && item.path().extension() == ".jsonl") {
        out.push_back(fs::relative(item.path(), workspace).generic_string());
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> ListReportFiles(const fs::path& report_dir) {
  std::vector<std::string> out;
  for (const char* sub : {"stats", "ranks", "gs"}) {
    const fs::path dir = report_dir / sub;
    if (!fs::is_directory(dir)) continue;
    for (const auto& item : fs::recursive_directory_iterator(dir)) {
      if (item.is_regular_file()) out.push_back(fs::relative(item.path(), report_dir).generic_string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

FileSet RenderDatasetStats(std::span<const DatasetEntry> entries,
                           std::span<const DiscardRecord> discards) {
  std::map<std::string, LangCounts> by_lang;
  LangCounts all;
  for (const auto& e : entries) {
    CountEntry(by_lang[e.lang], e);
    CountEntry(all, e);
  }
  for (const auto& d : discards) {
    CountDiscard(by_lang[d.lang], d);
    CountDiscard(all, d);
  }

  std::vector<std::string> header = {"lang", "gendered", "neutral", "discarded"};
  for (auto r : kAllDiscardReasons) header.push_back("discarded_" + std::string(ToString(r)));
  header.push_back("total");
  std::string stats = CsvLine(header);
  auto stats_row = [&](std::string_view lang, const LangCounts& c) {
    std::vector<std::string> row = {std::string(lang), Num(c.gendered), Num(c.neutral),
                                    Num(c.discarded)};
    for (auto r : kAllDiscardReasons) {
      auto it = c.by_reason.find(r);
      row.push_back(Num(it == c.by_reason.end() ? std::size_t{0} : it->second));
    }
    row.push_back(Num(c.gendered + c.neutral + c.discarded));
    stats += CsvLine(row);
  };

  std::string per_st = CsvLine({"lang", "stereotype_id", "gender", "gendered", "neutral", "discarded"});
  auto st_rows = [&](std::string_view lang, const LangCounts& c) {
    for (int id = 1; id <= kStereotypeCount; ++id) {
      per_st += CsvLine({std::string(lang), std::to_string(id),
                         std::string(ToString(StereotypeById(id).gender)),
                         Num(c.st_gendered[id - 1]), Num(c.st_neutral[id - 1]),
                         Num(c.st_discarded[id - 1])});
    }
  };

  json languages = json::object();
  for (const auto& [lang, c] : by_lang) {
    stats_row(lang, c);
    st_rows(lang, c);
    languages[lang] = CountsToJson(c);
  }
  stats_row(kAllLanguages, all);
  st_rows(kAllLanguages, all);

  json summary = {{"languages", languages}, {"totals", CountsToJson(all)}};
  return {{"stats/dataset_stats.csv", stats},
          {"stats/per_stereotype.csv", per_st},
          {"stats/summary.json", DumpJson(summary)}};
}

std::string RenderRankMatrix(std::span<const GroupSummary> summaries,
                             std::span<const std::string> languages) {
  if (languages.empty()) throw InvalidArgument("rank matrix needs at least one language");
  for (const auto& s : summaries) {
    if (s.overall.model_id != summaries.front().overall.model_id ||
        s.overall.template_mode != summaries.front().overall.template_mode) {
      throw InvalidArgument("rank matrix summaries mix models or template modes");
    }
  }
  const auto columns = StereotypeColumns();
  std::vector<std::string> header = {"lang"};
  for (int id : columns) header.push_back("s" + std::to_string(id));
  std::string out = CsvLine(header);
  for (const auto& lang : languages) {
    auto it = std::find_if(summaries.begin(), summaries.end(),
                           [&](const GroupSummary& s) { return s.overall.lang == lang; });
    if (it == summaries.end()) throw DataError("rank matrix: no summary for language '" + lang + "'");
    std::map<int, int> ranks;
    for (const auto& st : it->stereotypes) {
      if (st.rank) ranks[st.stereotype_id] = *st.rank;
    }
    if (ranks.size() != static_cast<std::size_t>(kStereotypeCount)) {
      throw DataError("rank matrix: language '" + lang + "' lacks ranks for all 16 stereotypes");
    }
    std::vector<std::string> row = {lang};
    for (int id : columns) row.push_back(std::to_string(ranks.at(id)));
    out += CsvLine(row);
  }
  return out;
}

std::string RenderQScores(std::span<const GroupSummary> summaries) {
  std::string out = CsvLine(
      {"model", "lang", "mode", "stereotype_id", "gender", "n", "q", "rank", "inclination"});
  for (const auto& s : summaries) {
    for (const auto& st : s.stereotypes) {
      out += CsvLine({s.overall.model_id, s.overall.lang,
                      std::string(ToString(s.overall.template_mode)),
                      std::to_string(st.stereotype_id),
                      std::string(ToString(StereotypeById(st.stereotype_id).gender)), Num(st.n),
                      Num(st.q), st.rank ? std::to_string(*st.rank) : "",
                      s.rate_defined ? Num(st.inclination) : ""});
    }
  }
  return out;
}

std::string_view GsFlag(double mean_g_s) {
  if (std::abs(mean_g_s - kGsReference) <= kNoStereotypingTolerance) return "no-stereotyping";
  return mean_g_s > kGsReference ? "stereotypical" : "anti-stereotypical";
}

FileSet RenderGsReport(std::span<const GroupSummary> summaries) {
  if (summaries.empty()) throw InvalidArgument("g_s report needs at least one summary");
  std::vector<const GroupSummary*> sorted;
  for (const auto& s : summaries) sorted.push_back(&s);
  std::stable_sort(sorted.begin(), sorted.end(), [](const GroupSummary* a, const GroupSummary* b) {
    return KeyOf(*a) < KeyOf(*b);
  });

  std::string rows = CsvLine({"model", "lang", "mode", "q_f", "q_m", "proxy_default", "g_s"});
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0, langs = 0;
  };
  std::map<std::pair<std::string, std::string>, Acc> averages;
  for (const auto* s : sorted) {
    const auto& o = s->overall;
    const std::string mode(ToString(o.template_mode));
    rows += CsvLine({o.model_id, o.lang, mode, s->rate_defined ? Num(o.q_f) : "",
                     s->rate_defined ? Num(o.q_m) : "",
                     s->rate_defined ? Num(o.proxy_default) : "",
                     s->rate_defined ? Num(o.g_s) : ""});
    auto& acc = averages[{o.model_id, mode}];
    ++acc.langs;
    if (s->rate_defined) {
      acc.sum += o.g_s;
      ++acc.n;
    }
  }
  std::string avg =
      CsvLine({"model", "mode", "n_langs", "n_defined", "mean_g_s", "reference", "flag"});
  for (const auto& [key, acc] : averages) {
    const bool defined = acc.n > 0;
    const double mean = defined ? acc.sum / static_cast<double>(acc.n) : 0.0;
    avg += CsvLine({key.first, key.second, Num(acc.langs), Num(acc.n), defined ? Num(mean) : "",
                    Num(kGsReference), defined ? std::string(GsFlag(mean)) : "undefined"});
  }
  return {{"gs/gs.csv", rows}, {"gs/gs_averages.csv", avg}};
}

json ReportParameters::ToJson() const {
  return json{{"proxy_feminine", proxy_feminine},
              {"proxy_masculine", proxy_masculine},
              {"language_warnings", language_warnings}};
}

ReportParameters ReportParameters::FromJson(const json& j) {
  ReportParameters p;
  try {
    p.proxy_feminine = j.at("proxy_feminine").get<std::vector<int>>();
    p.proxy_masculine = j.at("proxy_masculine").get<std::vector<int>>();
    p.language_warnings =
        j.value("language_warnings", std::map<std::string, std::vector<std::string>>{});
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report parameters: ") + e.what());
  }
  return p;
}

std::vector<GroupSummary> SummarizeScores(std::span<const SentenceScore> scores,
                                          const ReportParameters& params) {
  std::map<GroupKey, std::vector<SentenceScore>> groups;
  std::set<std::tuple<std::string, std::string, TemplateMode>> seen;
  for (const auto& s : scores) {
    if (!seen.emplace(s.model_id, s.entry_id, s.template_mode).second) continue;
    groups[{s.model_id, std::string(ToString(s.template_mode)), s.lang}].push_back(s);
  }
  std::vector<GroupSummary> out;
  for (const auto& [key, group] : groups) {
    out.push_back(SummarizeGroup(group, params.proxy_feminine, params.proxy_masculine));
  }
  return out;
}

ReportBuild BuildReport(const fs::path& workspace, const ReportParameters& params) {
  ReportBuild build;
  const auto inputs = ListInputs(workspace);

  std::vector<DatasetEntry> entries;
  std::vector<DiscardRecord> discards;
  std::vector<SentenceScore> scores;
  json input_list = json::array();
  for (const auto& rel : inputs) {
    const std::string content = ReadFile(workspace / rel);
    input_list.push_back({{"path", rel}, {"sha256", Sha256Hex(content)}});
    if (rel.starts_with("dataset/")) {
      auto part = ParseDataset(content);
      for (const auto& r : part.rejections) build.notes.push_back(rel + " rejected " + r);
      entries.insert(entries.end(), part.entries.begin(), part.entries.end());
    } else if (rel.starts_with("discards/")) {
      auto part = ParseDiscards(content);
      discards.insert(discards.end(), part.begin(), part.end());
    } else {
      auto part = ParseScores(content);
      scores.insert(scores.end(), part.begin(), part.end());
    }
  }

  build.files = RenderDatasetStats(entries, discards);
  const auto summaries = SummarizeScores(scores, params);
  for (const auto& s : summaries) {
    for (const auto& note : s.notes) {
      build.notes.push_back(s.overall.model_id + "/" + s.overall.lang + "/" +
                            std::string(ToString(s.overall.template_mode)) + ": " + note);
    }
  }

  if (!summaries.empty()) {
    build.files["ranks/q_scores.csv"] = RenderQScores(summaries);
    std::map<std::pair<std::string, std::string>, std::vector<GroupSummary>> by_model_mode;
    for (const auto& s : summaries) {
      by_model_mode[{s.overall.model_id, std::string(ToString(s.overall.template_mode))}]
          .push_back(s);
    }
    for (const auto& [key, group] : by_model_mode) {
      std::vector<std::string> langs;
      for (const auto& s : group) {
        if (s.missing.empty()) {
          langs.push_back(s.overall.lang);
        } else {
          build.notes.push_back(key.first + "/" + s.overall.lang + "/" + key.second +
                                ": left out of the rank matrix");
        }
      }
      if (langs.empty()) continue;
      build.files["ranks/" + SanitizeFileComponent(key.first) + "__" + key.second + ".csv"] =
          RenderRankMatrix(group, langs);
    }
    for (auto& [path, content] : RenderGsReport(summaries)) build.files[path] = content;
  } else {
    build.notes.push_back("no scores found; ranks and g_s not emitted");
  }

  build.notes.push_back(
      "r_masc compares per-token mean log-probabilities; token counts depend on the tokenizer");
  if (params.proxy_feminine.size() != params.proxy_masculine.size()) {
    build.notes.push_back("proxy default uses " + std::to_string(params.proxy_feminine.size()) +
                          " feminine and " + std::to_string(params.proxy_masculine.size()) +
                          " masculine stereotypes");
  }

  json outputs = json::array();
  for (const auto& [path, content] : build.files) {
    outputs.push_back({{"path", path}, {"sha256", Sha256Hex(content)}});
  }
  json manifest = {{"schema_version", kDatasetSchemaVersion},
                   {"parameters", params.ToJson()},
                   {"inputs", input_list},
                   {"outputs", outputs},
                   {"notes", build.notes}};
  build.files["manifest.json"] = DumpJson(manifest);
  return build;
}

void WriteReport(const fs::path& workspace, const ReportBuild& build) {
  const fs::path report = workspace / "report";
  std::error_code ec;
  for (const char* sub : {"stats", "ranks", "gs"}) {
    fs::remove_all(report / sub, ec);
    if (ec) throw IoError("cannot clear " + (report / sub).string());
  }
  for (const auto& [path, content] : build.files) WriteFileAtomic(report / path, content);
}

FileSet RenderAgreement(const AgreementInputs& inputs) {
  const auto records = ParseAnnotationCsv(inputs.annotations_csv);
  json labels = json::object();
  for (const auto& [id, label] : inputs.options.system_labels) {
    labels[id] = std::string(ToString(label));
  }
  json options = {{"resamples", inputs.options.resamples},
                  {"seed", inputs.options.seed},
                  {"system_labels", labels}};
  return {{"agreement/annotations.csv", inputs.annotations_csv},
          {"agreement/inputs.json", DumpJson(options)},
          {"agreement/agreement.json", DumpJson(ComputeAgreement(records, inputs.options))}};
}

AgreementInputs ReadAgreementInputs(const fs::path& agreement_dir) {
  AgreementInputs in;
  in.annotations_csv = ReadFile(agreement_dir / "annotations.csv");
  try {
    const json options = json::parse(ReadFile(agreement_dir / "inputs.json"));
    in.options.resamples = options.at("resamples").get<std::size_t>();
    in.options.seed = options.at("seed").get<std::uint64_t>();
    for (const auto& [id, label] : options.at("system_labels").items()) {
      const auto parsed = ParseGenderLabel(label.get<std::string>());
      if (!parsed) throw DataError("unknown system label for " + id);
      in.options.system_labels[id] = *parsed;
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed agreement inputs: ") + e.what());
  }
  return in;
}

json VerifyReport(const fs::path& workspace) {
  const fs::path report = workspace / "report";
  json mismatches = json::array();
  std::size_t checked = 0;
  auto mismatch = [&](const std::string& path, const std::string& problem) {
    mismatches.push_back({{"path", path}, {"problem", problem}});
  };
  auto compare = [&](const fs::path& dir, const FileSet& files, const std::string& prefix) {
    for (const auto& [path, content] : files) {
      ++checked;
      const fs::path on_disk = dir / path;
      if (!fs::exists(on_disk)) {
        mismatch(prefix + path, "missing");
      } else if (ReadFile(on_disk) != content) {
        mismatch(prefix + path, "content differs");
      }
    }
  };

  const fs::path manifest_path = report / "manifest.json";
  if (!fs::exists(manifest_path)) {
    mismatch("report/manifest.json", "missing");
    return json{{"ok", false}, {"checked", checked}, {"mismatches", mismatches}};
  }
  json manifest;
  try {
    manifest = json::parse(ReadFile(manifest_path));
  } catch (const json::exception&) {
    throw DataError("report/manifest.json is not valid JSON");
  }
  const auto params = ReportParameters::FromJson(manifest.value("parameters", json::object()));

  std::set<std::string> listed;
  for (const auto& input : manifest.value("inputs", json::array())) {
    const std::string rel = input.value("path", "");
    listed.insert(rel);
    ++checked;
    if (!fs::exists(workspace / rel)) {
      mismatch(rel, "input missing");
    } else if (Sha256Hex(ReadFile(workspace / rel)) != input.value("sha256", "")) {
      mismatch(rel, "input changed since report");
    }
  }
  for (const auto& rel : ListInputs(workspace)) {
    if (!listed.contains(rel)) mismatch(rel, "input not covered by report");
  }

  const ReportBuild build = BuildReport(workspace, params);
  compare(report, build.files, "report/");
  for (const auto& rel : ListReportFiles(report)) {
    if (!build.files.contains(rel)) mismatch("report/" + rel, "unexpected file");
  }

  if (fs::exists(report / "agreement" / "inputs.json")) {
    compare(report, RenderAgreement(ReadAgreementInputs(report / "agreement")), "report/");
  }
  return json{{"ok", mismatches.empty()}, {"checked", checked}, {"mismatches", mismatches}};
}

}  // namespace stereoeval
