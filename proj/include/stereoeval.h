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

/* C interface to the stereoeval library.
 *
 * Every function returns an se_status. On failure the message for the
 * calling thread is available from se_last_error() until the next call.
 * Strings returned through char** are owned by the caller and released with
 * se_free_string(). */

#ifndef STEREOEVAL_H_
#define STEREOEVAL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SE_EXPORT __declspec(dllexport)
#else
#define SE_EXPORT __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum se_status {
  SE_OK = 0,
  SE_INVALID_ARGUMENT = 1,
  SE_CONFIG = 3,
  SE_IO = 4,
  SE_BACKEND = 5,     /* also: command finished with some backend items failed */
  SE_MISMATCH = 6,    /* verify found differences */
  SE_DATA = 7,
  SE_UNDEFINED = 8,   /* statistic not defined for the input */
  SE_UNSUPPORTED = 9,
  SE_INTERNAL = 70
} se_status;

typedef struct se_config se_config;
typedef struct se_options se_options;

typedef enum se_pair_outcome {
  SE_PAIR_NEUTRAL = 0,
  SE_PAIR_GENDERED = 1,
  SE_PAIR_DISCARD = 2
} se_pair_outcome;

SE_EXPORT const char* se_version(void);
SE_EXPORT const char* se_last_error(void);
SE_EXPORT const char* se_status_name(se_status status);
SE_EXPORT void se_free_string(char* s);

/* Configuration. Environment overrides are read at load time. */
SE_EXPORT se_status se_config_new(se_config** out); /* all defaults */
SE_EXPORT se_status se_config_load(const char* path, se_config** out);
SE_EXPORT void se_config_free(se_config* config);
SE_EXPORT se_status se_config_set_workspace(se_config* config, const char* path);
SE_EXPORT se_status se_config_set_seed(se_config* config, uint64_t seed);
SE_EXPORT se_status se_config_set_cache_dir(se_config* config, const char* path);
SE_EXPORT se_status se_config_set_max_inflight(se_config* config, size_t max_inflight);

/* Per-command options. */
SE_EXPORT se_status se_options_new(se_options** out);
SE_EXPORT void se_options_free(se_options* options);
SE_EXPORT se_status se_options_add_language(se_options* options, const char* lang);
SE_EXPORT se_status se_options_add_model(se_options* options, const char* model_id);
/* "gendered-pair", "noun", "pronoun" or "auto". */
SE_EXPORT se_status se_options_set_mode(se_options* options, const char* mode);
SE_EXPORT se_status se_options_set_sample_size(se_options* options, size_t n);
SE_EXPORT se_status se_options_set_annotations(se_options* options, const char* path);
SE_EXPORT se_status se_options_set_validation_sample(se_options* options, const char* path);

/* Runs "expand", "stats", "sample-validation", "agreement", "score",
 * "report" or "verify". options may be NULL. A JSON summary is stored in
 * *summary_json for SE_OK, SE_BACKEND (partial) and SE_MISMATCH. */
SE_EXPORT se_status se_run(const se_config* config, const char* command,
                           const se_options* options, char** summary_json);

/* Primitives. */
SE_EXPORT se_status se_levenshtein(const char* a, const char* b, size_t* out);
SE_EXPORT se_status se_classify_pair(const char* masc_text, const char* fem_text,
                                     size_t max_differing_words, size_t max_char_edit,
                                     se_pair_outcome* out);
SE_EXPORT se_status se_r_masc(double ll_masc, double ll_fem, double* out);
/* SE_UNDEFINED when chance agreement is 1. */
SE_EXPORT se_status se_cohen_kappa(const char* const* labels_a, const char* const* labels_b,
                                   size_t n, double* out);
SE_EXPORT se_status se_pearson(const double* xs, const double* ys, size_t n, size_t resamples,
                               uint64_t seed, double* rho, double* p);

#ifdef __cplusplus
}
#endif

#endif  /* STEREOEVAL_H_ */
