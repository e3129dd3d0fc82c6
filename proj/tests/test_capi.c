/* Exercises the shared library through the C header only. */
#include "opgx/opgx.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

static void test_status_strings(void) {
  EXPECT(strlen(opgx_version()) > 0);
  EXPECT(strcmp(opgx_status_string(OPGX_OK), "ok") == 0);
  EXPECT(strlen(opgx_status_string(OPGX_HYPOTHESIS)) > 0);
}

static void test_invalid_arguments(void) {
  opgx_job* job = NULL;
  opgx_result* res = NULL;
  EXPECT(opgx_session_create(NULL) == OPGX_INVALID_ARGUMENT);
  EXPECT(opgx_job_create(NULL, &job) == OPGX_INVALID_ARGUMENT);
  EXPECT(opgx_job_create("nonsense", &job) == OPGX_USAGE);
  EXPECT(job == NULL);
  EXPECT(strstr(opgx_last_error(), "nonsense") != NULL);
  EXPECT(opgx_check(NULL, NULL, &res) == OPGX_INVALID_ARGUMENT);
  EXPECT(opgx_job_set_p(NULL, 1.0) == OPGX_INVALID_ARGUMENT);
  /* Destroying null handles is a no-op. */
  opgx_job_destroy(NULL);
  opgx_result_destroy(NULL);
  opgx_session_destroy(NULL);
}

static void test_check(opgx_session* s) {
  opgx_job* job = NULL;
  opgx_result* res = NULL;
  int dims[] = {2, 3};
  int held = -1, failed = -1, skipped = -1, numerical = -1;
  double gap = 0.0;

  EXPECT(opgx_job_create("definition", &job) == OPGX_OK);
  EXPECT(opgx_job_set_function(job, "power:s=1.5") == OPGX_OK);
  EXPECT(opgx_job_set_weight(job, "identity") == OPGX_OK);
  EXPECT(opgx_job_set_dims(job, dims, 2) == OPGX_OK);
  EXPECT(opgx_job_set_trials(job, 50) == OPGX_OK);
  EXPECT(opgx_job_set_seed(job, 42) == OPGX_OK);
  EXPECT(opgx_job_set_function(job, "wobble:1") == OPGX_USAGE);
  EXPECT(opgx_job_set_weight(job, "quartic") == OPGX_USAGE);
  EXPECT(opgx_job_set_trials(job, 0) == OPGX_USAGE);
  EXPECT(opgx_job_set_param(job, "nonsense", 1.0) == OPGX_USAGE);
  EXPECT(opgx_job_set_tolerance(job, -1.0, 1e-8) == OPGX_USAGE);
  EXPECT(opgx_job_set_interval(job, 5.0, 1.0) == OPGX_USAGE);

  EXPECT(opgx_check(s, job, &res) == OPGX_OK);
  EXPECT(opgx_result_exit_code(res) == 0);
  EXPECT(opgx_result_counts(res, &held, &failed, &skipped, &numerical) == OPGX_OK);
  EXPECT(held == 50 && failed == 0 && skipped == 0 && numerical == 0);
  EXPECT(opgx_result_min_gap(res, &gap) == 1);
  EXPECT(gap >= 0.0);
  EXPECT(strstr(opgx_result_jsonl(res), "\"trial_seed\"") != NULL);
  EXPECT(strlen(opgx_result_summary(res)) > 0);
  EXPECT(strlen(opgx_result_witness(res)) == 0);
  opgx_result_destroy(res);

  EXPECT(opgx_job_set_weight(job, "cubic") == OPGX_OK);
  EXPECT(opgx_check(s, job, &res) == OPGX_OK);
  EXPECT(opgx_result_exit_code(res) == 1);
  EXPECT(opgx_result_max_violation(res) > 0.0);
  opgx_result_destroy(res);
  opgx_job_destroy(job);
}

static void test_hypothesis_and_numerical(opgx_session* s) {
  opgx_job* job = NULL;
  opgx_result* res = NULL;
  int dims[] = {2};

  EXPECT(opgx_job_create("contraction", &job) == OPGX_OK);
  EXPECT(opgx_job_set_weight(job, "power:s=0.5") == OPGX_OK);
  EXPECT(opgx_job_set_trials(job, 3) == OPGX_OK);
  EXPECT(opgx_check(s, job, &res) == OPGX_OK);
  EXPECT(opgx_result_exit_code(res) == 4);
  opgx_result_destroy(res);
  /* The same hypothesis failure is a usage error for a search. */
  EXPECT(opgx_job_set_search(job, 100, 2, -1, 0.1) == OPGX_OK);
  EXPECT(opgx_falsify(s, job, &res) == OPGX_USAGE);
  opgx_job_destroy(job);

  /* Spectra near 1e300 overflow f(A) = A^1.5. */
  EXPECT(opgx_job_create("definition", &job) == OPGX_OK);
  EXPECT(opgx_job_set_interval(job, 1e300, INFINITY) == OPGX_OK);
  EXPECT(opgx_job_set_dims(job, dims, 1) == OPGX_OK);
  EXPECT(opgx_job_set_trials(job, 2) == OPGX_OK);
  EXPECT(opgx_check(s, job, &res) == OPGX_OK);
  EXPECT(opgx_result_exit_code(res) == 3);
  opgx_result_destroy(res);
  opgx_job_destroy(job);
}

static void test_falsify_and_classify(opgx_session* s) {
  opgx_job* job = NULL;
  opgx_result* res = NULL;
  const double ratios[] = {0.5, 1.5, 3.0};

  EXPECT(opgx_job_create("definition", &job) == OPGX_OK);
  EXPECT(opgx_job_set_function(job, "power:s=3") == OPGX_OK);
  EXPECT(opgx_job_set_search(job, 4000, 10, -1, 0.1) == OPGX_OK);
  EXPECT(opgx_job_set_seed(job, 7) == OPGX_OK);
  EXPECT(opgx_falsify(s, job, &res) == OPGX_OK);
  EXPECT(opgx_result_exit_code(res) == 1);
  EXPECT(strstr(opgx_result_witness(res), "opgx-witness") != NULL);
  opgx_result_destroy(res);

  EXPECT(opgx_classify(s, job, ratios, 3, &res) == OPGX_OK);
  EXPECT(opgx_result_exit_code(res) == 0);
  opgx_result_destroy(res);
  EXPECT(opgx_classify(s, job, NULL, 2, &res) == OPGX_INVALID_ARGUMENT);
  opgx_job_destroy(job);
}

static void test_replay(opgx_session* s) {
  opgx_job* job = NULL;
  opgx_result* res = NULL;
  FILE* f = NULL;
  char path[] = "opgx_capi_witness.json";

  EXPECT(opgx_replay_witness(s, "/nonexistent/witness.json", &res) == OPGX_IO);
  EXPECT(strlen(opgx_last_error()) > 0);

  EXPECT(opgx_job_create("definition", &job) == OPGX_OK);
  EXPECT(opgx_job_set_function(job, "power:s=3") == OPGX_OK);
  EXPECT(opgx_job_set_search(job, 4000, 10, -1, 0.1) == OPGX_OK);
  EXPECT(opgx_falsify(s, job, &res) == OPGX_OK);
  f = fopen(path, "w");
  EXPECT(f != NULL);
  if (f) {
    fputs(opgx_result_witness(res), f);
    fclose(f);
  }
  opgx_result_destroy(res);
  opgx_job_destroy(job);

  EXPECT(opgx_replay_witness(s, path, &res) == OPGX_OK);
  EXPECT(opgx_result_exit_code(res) == 1);
  opgx_result_destroy(res);
  remove(path);
}

static void test_suite(opgx_session* s) {
  opgx_result* res = NULL;
  const char* path = getenv("OPGX_TEST_SUITE");
  EXPECT(opgx_suite_run(s, "/nonexistent/suite.json", &res) == OPGX_IO);
  if (!path) return;
  EXPECT(opgx_suite_run(s, path, &res) == OPGX_OK);
  EXPECT(opgx_result_exit_code(res) == 0);
  EXPECT(strncmp(opgx_result_csv(res), "job_id,", 7) == 0);
  opgx_result_destroy(res);
}

static void test_helpers(void) {
  /* X = diag(1, 2), Y = diag(3, 2.5): λ_min(Y − X) = 0.5. */
  const double x[] = {1, 0, 0, 0, 0, 0, 2, 0};
  const double y[] = {3, 0, 0, 0, 0, 0, 2.5, 0};
  const double asym[] = {1, 0, 5, 0, 0, 0, 1, 0};
  double gap = 0.0;
  int member = -1;
  EXPECT(opgx_loewner_gap(x, y, 2, &gap) == OPGX_OK);
  EXPECT(fabs(gap - 0.5) < 1e-15);
  EXPECT(opgx_loewner_gap(x, asym, 2, &gap) == OPGX_USAGE);
  EXPECT(opgx_loewner_gap(x, y, 0, &gap) == OPGX_INVALID_ARGUMENT);
  EXPECT(opgx_classify_power(1.5, 1.0, &member) == OPGX_OK && member == 1);
  EXPECT(opgx_classify_power(3.0, 1.0, &member) == OPGX_OK && member == 0);
  EXPECT(opgx_classify_power(3.0, 2.0, &member) == OPGX_OK && member == 1);
  EXPECT(opgx_classify_power(1.0, 0.0, &member) == OPGX_USAGE);
}

int main(void) {
  opgx_session* s = NULL;
  test_status_strings();
  test_invalid_arguments();
  EXPECT(opgx_session_create(&s) == OPGX_OK);
  EXPECT(opgx_session_set_threads(s, 2) == OPGX_OK);
  test_check(s);
  test_hypothesis_and_numerical(s);
  test_falsify_and_classify(s);
  test_replay(s);
  test_suite(s);
  test_helpers();
  opgx_session_destroy(s);
  if (failures) {
    fprintf(stderr, "%d expectation(s) failed\n", failures);
    return 1;
  }
  printf("all C API expectations passed\n");
  return 0;
}
