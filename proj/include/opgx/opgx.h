/* C interface to the operator-inequality checker.
 *
 * Every call returns an opgx_status. On failure the session (or, for calls
 * without one, the thread) keeps a message readable via opgx_last_error.
 * Strings returned by accessors are owned by the handle they came from and
 * stay valid until it is destroyed. */
#ifndef OPGX_H
#define OPGX_H

#include <stddef.h>
#include <stdint.h>

#if defined(OPGX_BUILDING_LIBRARY)
#define OPGX_API __attribute__((visibility("default")))
#else
#define OPGX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum opgx_status {
  OPGX_OK = 0,
  OPGX_INVALID_ARGUMENT = 1, /* null handle/pointer, bad enum value */
  OPGX_USAGE = 2,            /* unknown names, malformed specs or files */
  OPGX_NUMERICAL = 3,        /* solver failure, domain or spectrum error */
  OPGX_HYPOTHESIS = 4,       /* a theorem hypothesis fails for the inputs */
  OPGX_IO = 5,
  OPGX_INTERNAL = 6
} opgx_status;

typedef struct opgx_session opgx_session;
typedef struct opgx_job opgx_job;
typedef struct opgx_result opgx_result;

OPGX_API const char* opgx_version(void);
OPGX_API const char* opgx_status_string(opgx_status status);

/* Last error message of the calling thread; empty when none. */
OPGX_API const char* opgx_last_error(void);

OPGX_API opgx_status opgx_session_create(opgx_session** out);
OPGX_API void opgx_session_destroy(opgx_session* session);
/* 0 restores the default (OPGX_THREADS or hardware concurrency). */
OPGX_API opgx_status opgx_session_set_threads(opgx_session* session, unsigned threads);

/* A job names one inequality; all other settings have defaults. */
OPGX_API opgx_status opgx_job_create(const char* inequality, opgx_job** out);
OPGX_API void opgx_job_destroy(opgx_job* job);
OPGX_API opgx_status opgx_job_set_id(opgx_job* job, const char* id);
OPGX_API opgx_status opgx_job_set_function(opgx_job* job, const char* f_spec);
OPGX_API opgx_status opgx_job_set_weight(opgx_job* job, const char* h_spec);
OPGX_API opgx_status opgx_job_set_p(opgx_job* job, double p);
OPGX_API opgx_status opgx_job_set_dims(opgx_job* job, const int* dims, size_t count);
/* hi may be INFINITY. */
OPGX_API opgx_status opgx_job_set_interval(opgx_job* job, double lo, double hi);
OPGX_API opgx_status opgx_job_set_tolerance(opgx_job* job, double atol, double rtol);
OPGX_API opgx_status opgx_job_set_seed(opgx_job* job, uint64_t seed);
OPGX_API opgx_status opgx_job_set_trials(opgx_job* job, int trials);
/* Numeric knobs: k, rank, m_kraus, p1, p2, alpha, isometry, transpose_twist,
 * limit_residual, p_small, cap_width. */
OPGX_API opgx_status opgx_job_set_param(opgx_job* job, const char* name, double value);
/* perturb_steps < 0 derives steps from budget / restarts. */
OPGX_API opgx_status opgx_job_set_search(opgx_job* job, uint64_t budget, int restarts, int perturb_steps,
                                         double perturb_scale);
OPGX_API opgx_status opgx_job_set_witness_dir(opgx_job* job, const char* dir);

OPGX_API opgx_status opgx_check(opgx_session* session, const opgx_job* job, opgx_result** out);
OPGX_API opgx_status opgx_falsify(opgx_session* session, const opgx_job* job, opgx_result** out);
/* ratios may be null (count 0) to classify the job's own f. */
OPGX_API opgx_status opgx_classify(opgx_session* session, const opgx_job* job, const double* ratios, size_t count,
                                   opgx_result** out);
OPGX_API opgx_status opgx_replay_witness(opgx_session* session, const char* path, opgx_result** out);
OPGX_API opgx_status opgx_suite_run(opgx_session* session, const char* config_path, opgx_result** out);

OPGX_API void opgx_result_destroy(opgx_result* result);
/* CLI exit code: 0 held, 1 violation, 3 numerical, 4 hypothesis only, 5 disagreement. */
OPGX_API int opgx_result_exit_code(const opgx_result* result);
OPGX_API const char* opgx_result_summary(const opgx_result* result);
OPGX_API const char* opgx_result_jsonl(const opgx_result* result);
/* Empty unless produced by opgx_suite_run. */
OPGX_API const char* opgx_result_csv(const opgx_result* result);
/* Certified witness JSON, or empty. */
OPGX_API const char* opgx_result_witness(const opgx_result* result);
OPGX_API opgx_status opgx_result_counts(const opgx_result* result, int* held, int* failed, int* skipped,
                                        int* numerical);
/* Returns 0 (and leaves *out alone) when no trial was evaluated. */
OPGX_API int opgx_result_min_gap(const opgx_result* result, double* out);
OPGX_API double opgx_result_max_violation(const opgx_result* result);

/* λ_min(Y − X) for n×n Hermitian matrices given as interleaved (re, im)
 * row-major arrays of length 2n². */
OPGX_API opgx_status opgx_loewner_gap(const double* x, const double* y, int n, double* gap);
/* Membership of t^s in the (p, identity) class: *member = 1 iff s/p ∈ [1, 2]. */
OPGX_API opgx_status opgx_classify_power(double s, double p, int* member);

#ifdef __cplusplus
}
#endif

#endif /* OPGX_H */
