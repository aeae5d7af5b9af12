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
#include "stereoeval/config.hpp"

#include <cstdlib>
#include <set>

#include "stereoeval/error.hpp"
#include "stereoeval/util.hpp"

namespace stereoeval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void RejectUnknownKeys(const json& object, const std::set<std::string>& known,
                       const std::string& where) {
  for (const auto& [key, _] : object.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T Get(const json& object, const char* key, const std::string& where, T fallback) {
  if (!object.contains(key)) return fallback;
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("invalid value for '" + std::string(key) + "' in " + where);
  }
}

fs::path Resolve(const fs::path& base, const std::string& value) {
  const fs::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

json ValidateBackend(const json& spec, const std::string& where) {
  if (!spec.is_object()) throw ConfigError(where + " must be an object");
  const std::string kind = Get<std::string>(spec, "kind", where, "");
  if (kind != "http" && kind != "fixture") {
    throw ConfigError(where + ".kind must be \"http\" or \"fixture\"");
  }
  return spec;
}

void ApplyHttpEnv(json& spec, const EnvMap& env, const char* url_var) {
  if (spec.value("kind", "") != "http") return;
  if (auto it = env.find(url_var); it != env.end()) spec["endpoint"] = it->second;
  if (auto it = env.find(kEnvApiKey); it != env.end()) spec["api_key"] = it->second;
}

std::vector<int> ParseIdSet(const json& value, const std::string& where) {
  std::vector<int> ids;
  try {
    ids = value.get<std::vector<int>>();
  } catch (const json::exception&) {
    throw ConfigError(where + " must be a list of stereotype ids");
  }
  if (ids.empty()) throw ConfigError(where + " must not be empty");
  std::set<int> unique;
  for (int id : ids) {
    if (!IsValidStereotypeId(id)) throw ConfigError(where + ": invalid id " + std::to_string(id));
    if (!unique.insert(id).second) throw ConfigError(where + ": duplicate id " + std::to_string(id));
  }
  return ids;
}

json Redact(json spec) {
  if (spec.is_object() && spec.contains("api_key")) spec["api_key"] = "<redacted>";
  return spec;
}

}  // namespace

EnvMap ReadEnvironment() {
  EnvMap env;
  for (const char* name : {kEnvTranslateUrl, kEnvQeUrl, kEnvScoreUrl, kEnvApiKey}) {
    if (const char* value = std::getenv(name); value != nullptr && *value != '\0') {
      env[name] = value;
    }
  }
  return env;
}

fs::path Config::CacheDir() const {
  if (cache_dir) return *cache_dir;
  if (workspace.empty()) throw ConfigError("no workspace configured (set 'workspace' or --out)");
  return workspace / "cache";
}

const json& Config::Model(const std::string& id) const {
  for (const auto& m : models) {
    if (m.at("id").get<std::string>() == id) return m;
  }
  throw ConfigError("unknown model '" + id + "'");
}

json Config::Describe() const {
  json models_out = json::array();
  for (const auto& m : models) models_out.push_back(Redact(m));
  return json{{"source_lang", source_lang},
              {"heuristic",
               {{"max_differing_words", expansion.heuristic.max_differing_words},
                {"max_char_edit", expansion.heuristic.max_char_edit},
                {"qe_threshold", expansion.heuristic.qe_threshold},
                {"unsupported_qe_policy", std::string(ToString(expansion.unsupported_qe))}}},
              {"stereotypes", {{"proxy_feminine", proxy_feminine}, {"proxy_masculine", proxy_masculine}}},
              {"backends",
               {{"translate", translate_backend ? Redact(*translate_backend) : json()},
                {"qe", qe_backend ? Redact(*qe_backend) : json()}}},
              {"models", models_out},
              {"seed", seed},
              {"pearson_resamples", pearson_resamples}};
}

Config ParseConfig(const json& doc, const fs::path& base_dir, const EnvMap& env) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  RejectUnknownKeys(doc,
                    {"workspace", "source_corpus", "source_lang", "languages", "language_registry",
                     "language_overrides", "heuristic", "stereotypes", "backends", "models",
                     "concurrency", "cache_dir", "seed", "pearson_resamples",
                     "validation_sample_size"},
                    "config");
  Config c;
  if (doc.contains("workspace")) {
    c.workspace = Resolve(base_dir, Get<std::string>(doc, "workspace", "config", ""));
  }
  if (doc.contains("source_corpus")) {
    c.source_corpus = Resolve(base_dir, Get<std::string>(doc, "source_corpus", "config", ""));
  }
  c.source_lang = Get<std::string>(doc, "source_lang", "config", c.source_lang);
  if (doc.contains("language_registry")) {
    c.registry.MergeFile(Resolve(base_dir, Get<std::string>(doc, "language_registry", "config", "")));
  }
  if (doc.contains("language_overrides")) c.registry.Merge(doc.at("language_overrides"));
  c.languages = Get<std::vector<std::string>>(doc, "languages", "config", {});
  for (const auto& lang : c.languages) c.registry.Get(lang);
  if (!c.registry.Contains(c.source_lang)) {
    throw ConfigError("source_lang '" + c.source_lang + "' is not in the language registry");
  }

  if (doc.contains("heuristic")) {
    const json& h = doc.at("heuristic");
    if (!h.is_object()) throw ConfigError("heuristic must be an object");
    RejectUnknownKeys(h, {"max_differing_words", "max_char_edit", "qe_threshold",
                          "unsupported_qe_policy"}, "heuristic");
    auto& cfg = c.expansion.heuristic;
    const auto words = Get<long long>(h, "max_differing_words", "heuristic", 1);
    const auto edits = Get<long long>(h, "max_char_edit", "heuristic", 2);
    if (words < 1) throw ConfigError("heuristic.max_differing_words must be >= 1");
    if (edits < 0) throw ConfigError("heuristic.max_char_edit must be >= 0");
    cfg.max_differing_words = static_cast<std::size_t>(words);
    cfg.max_char_edit = static_cast<std::size_t>(edits);
    cfg.qe_threshold = Get<double>(h, "qe_threshold", "heuristic", cfg.qe_threshold);
    const auto policy = Get<std::string>(h, "unsupported_qe_policy", "heuristic", "skip-qe");
    const auto parsed = ParseUnsupportedQePolicy(policy);
    if (!parsed) throw ConfigError("heuristic.unsupported_qe_policy must be skip-qe or discard-all");
    c.expansion.unsupported_qe = *parsed;
  }
  c.expansion.heuristic.Validate();
  c.expansion.source_lang = c.source_lang;

  if (doc.contains("stereotypes")) {
    const json& s = doc.at("stereotypes");
    if (!s.is_object()) throw ConfigError("stereotypes must be an object");
    RejectUnknownKeys(s, {"proxy_feminine", "proxy_masculine"}, "stereotypes");
    if (s.contains("proxy_feminine")) {
      c.proxy_feminine = ParseIdSet(s.at("proxy_feminine"), "stereotypes.proxy_feminine");
    }
    if (s.contains("proxy_masculine")) {
      c.proxy_masculine = ParseIdSet(s.at("proxy_masculine"), "stereotypes.proxy_masculine");
    }
  }

  if (doc.contains("backends")) {
    const json& b = doc.at("backends");
    if (!b.is_object()) throw ConfigError("backends must be an object");
    RejectUnknownKeys(b, {"translate", "qe"}, "backends");
    if (b.contains("translate")) {
      c.translate_backend = ValidateBackend(b.at("translate"), "backends.translate");
      ApplyHttpEnv(*c.translate_backend, env, kEnvTranslateUrl);
    }
    if (b.contains("qe")) {
      c.qe_backend = ValidateBackend(b.at("qe"), "backends.qe");
      ApplyHttpEnv(*c.qe_backend, env, kEnvQeUrl);
    }
  }

  if (doc.contains("models")) {
    if (!doc.at("models").is_array()) throw ConfigError("models must be a list");
    std::set<std::string> ids;
    for (const auto& m : doc.at("models")) {
      json spec = ValidateBackend(m, "models[]");
      const std::string id = Get<std::string>(spec, "id", "models[]", "");
      if (id.empty()) throw ConfigError("every model needs a non-empty 'id'");
      if (!ids.insert(id).second) throw ConfigError("duplicate model id '" + id + "'");
      if (spec.contains("params") && !spec.at("params").is_object()) {
        throw ConfigError("models[" + id + "].params must be an object");
      }
      ApplyHttpEnv(spec, env, kEnvScoreUrl);
      c.models.push_back(std::move(spec));
    }
  }

  if (doc.contains("concurrency")) {
    const json& cc = doc.at("concurrency");
    if (!cc.is_object()) throw ConfigError("concurrency must be an object");
    RejectUnknownKeys(cc, {"max_inflight"}, "concurrency");
    c.max_inflight = Get<std::size_t>(cc, "max_inflight", "concurrency", c.max_inflight);
  }
  if (c.max_inflight == 0) throw ConfigError("concurrency.max_inflight must be >= 1");
  if (doc.contains("cache_dir")) {
    c.cache_dir = Resolve(base_dir, Get<std::string>(doc, "cache_dir", "config", ""));
  }
  c.seed = Get<std::uint64_t>(doc, "seed", "config", c.seed);
  c.pearson_resamples = Get<std::size_t>(doc, "pearson_resamples", "config", c.pearson_resamples);
  if (c.pearson_resamples == 0) throw ConfigError("pearson_resamples must be >= 1");
  c.validation_sample_size =
      Get<std::size_t>(doc, "validation_sample_size", "config", c.validation_sample_size);
  return c;
}

Config LoadConfig(const fs::path& path, const EnvMap& env) {
  std::string content;
  try {
    content = ReadFile(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  const fs::path base = fs::absolute(path).parent_path();
  return ParseConfig(doc, base, env);
}

void ApplyOverrides(Config& config, const ConfigOverrides& o) {
  if (o.workspace) config.workspace = fs::absolute(*o.workspace).lexically_normal();
  if (o.seed) config.seed = *o.seed;
  if (o.cache_dir) config.cache_dir = fs::absolute(*o.cache_dir).lexically_normal();
  if (o.max_inflight) {
    if (*o.max_inflight == 0) throw InvalidArgument("max_inflight override must be >= 1");
    config.max_inflight = *o.max_inflight;
  }
}

}  // namespace stereoeval
