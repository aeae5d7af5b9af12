/* Copyright 2026 The stereoeval Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Exercises the C interface from a C translation unit. */

#define _XOPEN_SOURCE 700
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <unistd.h>

#include "stereoeval.h"

static int failures = 0;

#define EXPECT(cond)                                             \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                \
    }                                                            \
  } while (0)

static void test_primitives(void) {
  size_t d = 0;
  EXPECT(se_levenshtein("unavený", "unavená", &d) == SE_OK && d == 1);
  EXPECT(se_levenshtein(NULL, "x", &d) == SE_INVALID_ARGUMENT);
  EXPECT(strlen(se_last_error()) > 0);

  se_pair_outcome o;
  EXPECT(se_classify_pair("Som emotívny.", "Som emotívna.", 1, 2, &o) == SE_OK &&
         o == SE_PAIR_GENDERED);
  EXPECT(se_classify_pair("Sono qui.", "Sono qui.", 1, 2, &o) == SE_OK && o == SE_PAIR_NEUTRAL);
  EXPECT(se_classify_pair("", "x", 1, 2, &o) == SE_INVALID_ARGUMENT);

  double r = 0, s = 0;
  EXPECT(se_r_masc(-1.5, -2.25, &r) == SE_OK);
  EXPECT(se_r_masc(-2.25, -1.5, &s) == SE_OK);
  EXPECT(r == 1.0 - s);
  EXPECT(se_r_masc(NAN, 0.0, &r) == SE_INVALID_ARGUMENT);

  const char* a[] = {"yes", "yes", "no", "no"};
  const char* b[] = {"yes", "no", "no", "no"};
  const char* same[] = {"x", "x", "x", "x"};
  double k = 0;
  EXPECT(se_cohen_kappa(a, b, 4, &k) == SE_OK && fabs(k - 0.5) < 1e-12);
  EXPECT(se_cohen_kappa(same, same, 4, &k) == SE_UNDEFINED);

  const double xs[] = {1, 2, 3, 4, 5}, ys[] = {2, 4, 6, 8, 10};
  double rho = 0, p = 0;
  EXPECT(se_pearson(xs, ys, 5, 100, 1, &rho, &p) == SE_OK && rho == 1.0 && p > 0 && p <= 1);

  EXPECT(strcmp(se_status_name(SE_MISMATCH), "mismatch") == 0);
  EXPECT(se_version()[0] != '\0');
}

static int run(const se_config* c, const char* cmd, const se_options* o) {
  char* summary = NULL;
  const se_status st = se_run(c, cmd, o, &summary);
  if (st != SE_OK) fprintf(stderr, "%s: %s (%s)\n", cmd, se_status_name(st), se_last_error());
  EXPECT(st != SE_OK || (summary != NULL && summary[0] == '{'));
  se_free_string(summary);
  return st;
}

static void test_pipeline(void) {
  char dir[] = "/tmp/se-capi-XXXXXX";
  EXPECT(mkdtemp(dir) != NULL);

  se_config* config = NULL;
  EXPECT(se_config_load(STEREOEVAL_FIXTURES "/config.json", &config) == SE_OK);
  EXPECT(se_config_set_workspace(config, dir) == SE_OK);
  EXPECT(se_config_set_max_inflight(config, 0) == SE_INVALID_ARGUMENT);

  se_options* options = NULL;
  EXPECT(se_options_new(&options) == SE_OK);
  EXPECT(se_options_add_language(options, "sk") == SE_OK);
  EXPECT(se_options_add_language(options, "fi") == SE_OK);
  EXPECT(se_options_set_mode(options, "sideways") == SE_INVALID_ARGUMENT);

  EXPECT(run(config, "expand", options) == SE_OK);
  EXPECT(run(config, "stats", NULL) == SE_OK);
  EXPECT(run(config, "score", options) == SE_OK);
  EXPECT(run(config, "report", NULL) == SE_OK);
  EXPECT(run(config, "verify", NULL) == SE_OK);

  char* summary = NULL;
  EXPECT(se_run(config, "launch", NULL, &summary) == SE_INVALID_ARGUMENT);
  EXPECT(summary == NULL);

  se_options* pronoun = NULL;
  EXPECT(se_options_new(&pronoun) == SE_OK);
  EXPECT(se_options_add_language(pronoun, "fi") == SE_OK);
  EXPECT(se_options_set_mode(pronoun, "pronoun") == SE_OK);
  EXPECT(se_run(config, "score", pronoun, &summary) == SE_CONFIG);

  se_options_free(pronoun);
  se_options_free(options);
  se_config_free(config);

  char cmd[256];
  snprintf(cmd, sizeof cmd, "rm -rf '%s'", dir);
  EXPECT(system(cmd) == 0);
}

int main(void) {
  test_primitives();
  test_pipeline();
  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  printf("c api: all checks passed\n");
  return 0;
}
