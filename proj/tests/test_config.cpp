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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "stereoeval/config.hpp"
#include "stereoeval/error.hpp"
#include "stereoeval/util.hpp"

using namespace stereoeval;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = ParseConfig(json::object(), "/base", {});
  CHECK(c.workspace.empty());
  CHECK(c.source_lang == "en");
  CHECK(c.expansion.heuristic.qe_threshold == 0.85);
  CHECK(c.expansion.heuristic.max_char_edit == 2);
  CHECK(c.proxy_feminine.size() == 7);
  CHECK(c.proxy_masculine.size() == 9);
  CHECK(c.max_inflight == 4);
}

TEST_CASE("fixture config file") {
  const auto c = LoadConfig(fs::path(STEREOEVAL_FIXTURES) / "config.json", {});
  CHECK(c.languages == std::vector<std::string>{"en", "sk", "fi", "de"});
  REQUIRE(c.source_corpus);
  CHECK(c.source_corpus->is_absolute());
  CHECK(fs::exists(*c.source_corpus));
  CHECK(c.models.size() == 2);
  CHECK(c.Model("fixture-chars")["tokenization"] == "chars");
  CHECK(CodeOf([&] { c.Model("nope"); }) == ErrorCode::kConfig);
  CHECK(c.seed == 7);
}

TEST_CASE("relative paths resolve against the config directory") {
  const auto c = ParseConfig({{"workspace", "ws"}, {"cache_dir", "/abs/cache"}}, "/etc/se", {});
  CHECK(c.workspace == fs::path("/etc/se/ws"));
  CHECK(c.CacheDir() == fs::path("/abs/cache"));
  const auto d = ParseConfig({{"workspace", "ws"}}, "/etc/se", {});
  CHECK(d.CacheDir() == fs::path("/etc/se/ws/cache"));
}

TEST_CASE("invalid documents") {
  CHECK(CodeOf([] { ParseConfig({{"worksapce", "x"}}, "/", {}); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseConfig({{"heuristic", {{"qe", 1}}}}, "/", {}); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseConfig({{"heuristic", {{"qe_threshold", 2.0}}}}, "/", {}); }) ==
        ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseConfig({{"languages", {"xx"}}}, "/", {}); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseConfig({{"models", {{{"kind", "fixture"}}}}}, "/", {}); }) ==
        ErrorCode::kConfig);
  const json dup = {{"models", {{{"id", "a"}, {"kind", "fixture"}}, {{"id", "a"}, {"kind", "fixture"}}}}};
  CHECK(CodeOf([&] { ParseConfig(dup, "/", {}); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseConfig({{"backends", {{"translate", {{"kind", "ftp"}}}}}}, "/", {}); }) ==
        ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseConfig({{"concurrency", {{"max_inflight", 0}}}}, "/", {}); }) ==
        ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseConfig(json::array(), "/", {}); }) == ErrorCode::kConfig);

  oracle::TempDir dir;
  WriteFileAtomic(dir.path() / "bad.json", "{not json");
  CHECK(CodeOf([&] { LoadConfig(dir.path() / "bad.json", {}); }) == ErrorCode::kConfig);
  CHECK(CodeOf([&] { LoadConfig(dir.path() / "missing.json", {}); }) == ErrorCode::kConfig);
}

TEST_CASE("language overrides") {
  const json doc = {{"languages", {"xx"}},
                    {"language_overrides",
                     {{"xx",
                       {{"name", "Test"},
                        {"gendered_morphology", true},
                        {"pronoun_templates_available", false},
                        {"initial_masc", "He said \"{S}\""},
                        {"initial_fem", "She said \"{S}\""},
                        {"final_noun_masc", "\"{S},\" he said"},
                        {"final_noun_fem", "\"{S},\" she said"},
                        {"final_pron_masc", nullptr},
                        {"final_pron_fem", nullptr}}}}}};
  const auto c = ParseConfig(doc, "/", {});
  CHECK(c.registry.Get("xx").gendered_morphology);
}

TEST_CASE("environment overrides apply to http backends") {
  const json doc = {{"backends",
                     {{"translate", {{"kind", "http"}, {"endpoint", "http://file/"}}},
                      {"qe", {{"kind", "fixture"}}}}},
                    {"models", {{{"id", "m"}, {"kind", "http"}, {"endpoint", "http://file/"}}}}};
  const EnvMap env = {{kEnvTranslateUrl, "http://env-t/"},
                      {kEnvQeUrl, "http://env-q/"},
                      {kEnvScoreUrl, "http://env-s/"},
                      {kEnvApiKey, "sekret"}};
  const auto c = ParseConfig(doc, "/", env);
  CHECK((*c.translate_backend)["endpoint"] == "http://env-t/");
  CHECK((*c.translate_backend)["api_key"] == "sekret");
  CHECK_FALSE(c.qe_backend->contains("endpoint"));
  CHECK(c.Model("m")["endpoint"] == "http://env-s/");
  CHECK(c.Describe().dump().find("sekret") == std::string::npos);
}

TEST_CASE("command-line overrides") {
  auto c = ParseConfig({{"seed", 3}}, "/", {});
  ConfigOverrides o;
  o.workspace = "rel/ws";
  o.seed = 9;
  o.max_inflight = 1;
  ApplyOverrides(c, o);
  CHECK(c.workspace.is_absolute());
  CHECK(c.seed == 9);
  CHECK(c.max_inflight == 1);
}
