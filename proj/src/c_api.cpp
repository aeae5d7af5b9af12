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
#include "stereoeval.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "stereoeval/commands.hpp"
#include "stereoeval/config.hpp"
#include "stereoeval/diff.hpp"
#include "stereoeval/error.hpp"
#include "stereoeval/expansion.hpp"
#include "stereoeval/metrics.hpp"
#include "stereoeval/scoring.hpp"

struct se_config {
  stereoeval::Config config;
};

struct se_options {
  stereoeval::CommandOptions options;
};

namespace {

std::string& LastError() {
  thread_local std::string message;
  return message;
}

se_status Fail(se_status status, const char* message) {
  LastError() = message;
  return status;
}

se_status FromCode(stereoeval::ErrorCode code) {
  switch (code) {
    case stereoeval::ErrorCode::kInvalidArgument: return SE_INVALID_ARGUMENT;
    case stereoeval::ErrorCode::kConfig: return SE_CONFIG;
    case stereoeval::ErrorCode::kIo: return SE_IO;
    case stereoeval::ErrorCode::kBackend: return SE_BACKEND;
    case stereoeval::ErrorCode::kMismatch: return SE_MISMATCH;
    case stereoeval::ErrorCode::kData: return SE_DATA;
    case stereoeval::ErrorCode::kUndefined: return SE_UNDEFINED;
    case stereoeval::ErrorCode::kUnsupported: return SE_UNSUPPORTED;
  }
  return SE_INTERNAL;
}

char* Duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

#define SE_REQUIRE(cond)                                                   \
  do {                                                                     \
    if (!(cond)) return Fail(SE_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

#define SE_API_PROLOGUE \
  LastError().clear();  \
  try {
#define SE_API_EPILOGUE                                 \
  }                                                     \
  catch (const stereoeval::Error& e) {                  \
    return Fail(FromCode(e.code()), e.what());          \
  }                                                     \
  catch (const std::bad_alloc&) {                       \
    return Fail(SE_INTERNAL, "out of memory");          \
  }                                                     \
  catch (const std::exception& e) {                     \
    return Fail(SE_INTERNAL, e.what());                 \
  }                                                     \
  catch (...) {                                         \
    return Fail(SE_INTERNAL, "unknown error");          \
  }

extern "C" {

const char* se_version(void) { return "1.0.0"; }

const char* se_last_error(void) { return LastError().c_str(); }

const char* se_status_name(se_status status) {
  switch (status) {
    case SE_OK: return "ok";
    case SE_INVALID_ARGUMENT: return "invalid-argument";
    case SE_CONFIG: return "config";
    case SE_IO: return "io";
    case SE_BACKEND: return "backend";
    case SE_MISMATCH: return "mismatch";
    case SE_DATA: return "data";
    case SE_UNDEFINED: return "undefined";
    case SE_UNSUPPORTED: return "unsupported";
    case SE_INTERNAL: return "internal";
  }
  return "unknown";
}

void se_free_string(char* s) { std::free(s); }

se_status se_config_new(se_config** out) {
  SE_REQUIRE(out);
  *out = nullptr;
  SE_API_PROLOGUE
  *out = new se_config{stereoeval::ParseConfig(nlohmann::json::object(), ".",
                                                stereoeval::ReadEnvironment())};
  return SE_OK;
  SE_API_EPILOGUE
}

se_status se_config_load(const char* path, se_config** out) {
  SE_REQUIRE(path);
  SE_REQUIRE(out);
  *out = nullptr;
  SE_API_PROLOGUE
  auto config = std::make_unique<se_config>(
      se_config{stereoeval::LoadConfig(path, stereoeval::ReadEnvironment())});
  *out = config.release();
  return SE_OK;
  SE_API_EPILOGUE
}

void se_config_free(se_config* config) { delete config; }

se_status se_config_set_workspace(se_config* config, const char* path) {
  SE_REQUIRE(config);
  SE_REQUIRE(path);
  SE_API_PROLOGUE
  stereoeval::ApplyOverrides(config->config, {.workspace = path});
  return SE_OK;
  SE_API_EPILOGUE
}

se_status se_config_set_seed(se_config* config, uint64_t seed) {
  SE_REQUIRE(config);
  config->config.seed = seed;
  return SE_OK;
}

se_status se_config_set_cache_dir(se_config* config, const char* path) {
  SE_REQUIRE(config);
  SE_REQUIRE(path);
  SE_API_PROLOGUE
  stereoeval::ApplyOverrides(config->config, {.cache_dir = path});
  return SE_OK;
  SE_API_EPILOGUE
}

se_status se_config_set_max_inflight(se_config* config, size_t max_inflight) {
  SE_REQUIRE(config);
  SE_API_PROLOGUE
  stereoeval::ApplyOverrides(config->config, {.max_inflight = max_inflight});
  return SE_OK;
  SE_API_EPILOGUE
}

se_status se_options_new(se_options** out) {
  SE_REQUIRE(out);
  SE_API_PROLOGUE
  *out = new se_options();
  return SE_OK;
  SE_API_EPILOGUE
}

void se_options_free(se_options* options) { delete options; }

se_status se_options_add_language(se_options* options, const char* lang) {
  SE_REQUIRE(options);
  SE_REQUIRE(lang);
  SE_API_PROLOGUE
  options->options.languages.emplace_back(lang);
  return SE_OK;
  SE_API_EPILOGUE
}

se_status se_options_add_model(se_options* options, const char* model_id) {
  SE_REQUIRE(options);
  SE_REQUIRE(model_id);
  SE_API_PROLOGUE
  options->options.models.emplace_back(model_id);
  return SE_OK;
  SE_API_EPILOGUE
}

se_status se_options_set_mode(se_options* options, const char* mode) {
  SE_REQUIRE(options);
  SE_REQUIRE(mode);
  SE_API_PROLOGUE
  const std::string m(mode);
  if (m != "auto" && !stereoeval::ParseTemplateMode(m)) {
    return Fail(SE_INVALID_ARGUMENT, "mode must be gendered-pair, noun, pronoun or auto");
  }
  options->options.mode = m;
  return SE_OK;
  SE_API_EPILOGUE
}

se_status se_options_set_sample_size(se_options* options, size_t n) {
  SE_REQUIRE(options);
  options->options.sample_size = n;
  return SE_OK;
}

se_status se_options_set_annotations(se_options* options, const char* path) {
  SE_REQUIRE(options);
  SE_REQUIRE(path);
  SE_API_PROLOGUE
  options->options.annotations = path;
  return SE_OK;
  SE_API_EPILOGUE
}

se_status se_options_set_validation_sample(se_options* options, const char* path) {
  SE_REQUIRE(options);
  SE_REQUIRE(path);
  SE_API_PROLOGUE
  options->options.validation_sample = path;
  return SE_OK;
  SE_API_EPILOGUE
}

se_status se_run(const se_config* config, const char* command, const se_options* options,
                 char** summary_json) {
  SE_REQUIRE(config);
  SE_REQUIRE(command);
  SE_REQUIRE(summary_json);
  *summary_json = nullptr;
  SE_API_PROLOGUE
  static const se_options kDefaults{};
  const auto result = stereoeval::RunCommand(command, config->config,
                                             (options ? *options : kDefaults).options);
  *summary_json = Duplicate(result.summary.dump());
  switch (result.outcome) {
    case stereoeval::Outcome::kOk: return SE_OK;
    case stereoeval::Outcome::kPartial:
      LastError() = "some backend requests failed; see the summary";
      return SE_BACKEND;
    case stereoeval::Outcome::kMismatch:
      LastError() = "report does not match a fresh recomputation";
      return SE_MISMATCH;
  }
  return SE_INTERNAL;
  SE_API_EPILOGUE
}

se_status se_levenshtein(const char* a, const char* b, size_t* out) {
  SE_REQUIRE(a);
  SE_REQUIRE(b);
  SE_REQUIRE(out);
  SE_API_PROLOGUE
  *out = stereoeval::Levenshtein(a, b);
  return SE_OK;
  SE_API_EPILOGUE
}

se_status se_classify_pair(const char* masc_text, const char* fem_text,
                           size_t max_differing_words, size_t max_char_edit,
                           se_pair_outcome* out) {
  SE_REQUIRE(masc_text);
  SE_REQUIRE(fem_text);
  SE_REQUIRE(out);
  SE_API_PROLOGUE
  stereoeval::PairHeuristicConfig config;
  config.max_differing_words = max_differing_words;
  config.max_char_edit = max_char_edit;
  config.Validate();
  using Outcome = stereoeval::PairClassification::Outcome;
  switch (stereoeval::ClassifyPair(masc_text, fem_text, config).outcome) {
    case Outcome::kNeutral: *out = SE_PAIR_NEUTRAL; break;
    case Outcome::kGendered: *out = SE_PAIR_GENDERED; break;
    case Outcome::kDiscard: *out = SE_PAIR_DISCARD; break;
  }
  return SE_OK;
  SE_API_EPILOGUE
}

se_status se_r_masc(double ll_masc, double ll_fem, double* out) {
  SE_REQUIRE(out);
  SE_API_PROLOGUE
  *out = stereoeval::RelativeMasculineLikelihood(ll_masc, ll_fem);
  return SE_OK;
  SE_API_EPILOGUE
}

se_status se_cohen_kappa(const char* const* labels_a, const char* const* labels_b, size_t n,
                         double* out) {
  SE_REQUIRE(labels_a);
  SE_REQUIRE(labels_b);
  SE_REQUIRE(out);
  SE_API_PROLOGUE
  std::vector<std::string> a, b;
  for (size_t i = 0; i < n; ++i) {
    if (labels_a[i] == nullptr || labels_b[i] == nullptr) {
      return Fail(SE_INVALID_ARGUMENT, "null label");
    }
    a.emplace_back(labels_a[i]);
    b.emplace_back(labels_b[i]);
  }
  const auto kappa = stereoeval::CohenKappa(a, b);
  if (!kappa) return Fail(SE_UNDEFINED, "kappa not calculable: no variation in labels");
  *out = *kappa;
  return SE_OK;
  SE_API_EPILOGUE
}

se_status se_pearson(const double* xs, const double* ys, size_t n, size_t resamples,
                     uint64_t seed, double* rho, double* p) {
  SE_REQUIRE(xs);
  SE_REQUIRE(ys);
  SE_REQUIRE(rho);
  SE_REQUIRE(p);
  SE_API_PROLOGUE
  const auto result = stereoeval::Pearson({xs, n}, {ys, n}, resamples, seed);
  *rho = result.rho;
  *p = result.p;
  return SE_OK;
  SE_API_EPILOGUE
}

}  // extern "C"
