#include "opgx/opgx.h"

#include "opgx/parallel.hpp"
#include "opgx/report.hpp"

#include <cmath>
#include <new>
#include <string>

struct opgx_session {
  unsigned threads = 0;
};

struct opgx_job {
  opgx::JobSpec spec;
  std::optional<std::string> witness_dir;
};

struct opgx_result {
  int exit_code = 0;
  std::string summary;
  std::string jsonl;
  std::string csv;
  std::string witness;
  opgx::JobTally tally;
};

namespace {

thread_local std::string g_last_error;

opgx_status fail(opgx_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

opgx_status status_for(opgx::ErrorKind kind) {
  switch (kind) {
    case opgx::ErrorKind::usage: return OPGX_USAGE;
    case opgx::ErrorKind::hypothesis: return OPGX_HYPOTHESIS;
    case opgx::ErrorKind::io: return OPGX_IO;
    default: return OPGX_NUMERICAL;
  }
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
opgx_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return OPGX_OK;
  } catch (const opgx::Error& e) {
    return fail(status_for(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(OPGX_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(OPGX_INTERNAL, e.what());
  } catch (...) {
    return fail(OPGX_INTERNAL, "unknown error");
  }
}

opgx::RunOptions run_options(const opgx_session* s, const opgx_job* job) {
  opgx::RunOptions opts;
  opts.threads = s->threads ? s->threads : opgx::default_thread_count();
  if (job) opts.witness_dir = job->witness_dir;
  return opts;
}

#define OPGX_REQUIRE(cond, what) \
  if (!(cond)) return fail(OPGX_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* opgx_version(void) {
  return "0.1.0";
}

const char* opgx_status_string(opgx_status status) {
  switch (status) {
    case OPGX_OK: return "ok";
    case OPGX_INVALID_ARGUMENT: return "invalid argument";
    case OPGX_USAGE: return "usage error";
    case OPGX_NUMERICAL: return "numerical error";
    case OPGX_HYPOTHESIS: return "hypothesis violated";
    case OPGX_IO: return "i/o error";
    case OPGX_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* opgx_last_error(void) {
  return g_last_error.c_str();
}

opgx_status opgx_session_create(opgx_session** out) {
  OPGX_REQUIRE(out, "out is null");
  return guarded([&] { *out = new opgx_session(); });
}

void opgx_session_destroy(opgx_session* session) {
  delete session;
}

opgx_status opgx_session_set_threads(opgx_session* session, unsigned threads) {
  OPGX_REQUIRE(session, "session is null");
  session->threads = threads;
  return OPGX_OK;
}

opgx_status opgx_job_create(const char* inequality, opgx_job** out) {
  OPGX_REQUIRE(inequality && out, "null argument");
  return guarded([&] {
    const auto id = opgx::parse_inequality(inequality);
    if (!id) throw opgx::UsageError(std::string("unknown inequality '") + inequality + "'");
    auto job = new opgx_job();
    job->spec.inequality = *id;
    job->spec.id = inequality;
    *out = job;
  });
}

void opgx_job_destroy(opgx_job* job) {
  delete job;
}

opgx_status opgx_job_set_id(opgx_job* job, const char* id) {
  OPGX_REQUIRE(job && id && *id, "null or empty id");
  job->spec.id = id;
  return OPGX_OK;
}

opgx_status opgx_job_set_function(opgx_job* job, const char* f_spec) {
  OPGX_REQUIRE(job && f_spec, "null argument");
  return guarded([&] {
    (void)opgx::parse_function(f_spec, job->spec.interval());
    job->spec.f = f_spec;
  });
}

opgx_status opgx_job_set_weight(opgx_job* job, const char* h_spec) {
  OPGX_REQUIRE(job && h_spec, "null argument");
  return guarded([&] {
    (void)opgx::parse_weight(h_spec);
    job->spec.h = h_spec;
  });
}

opgx_status opgx_job_set_p(opgx_job* job, double p) {
  OPGX_REQUIRE(job, "job is null");
  if (!(p > 0.0) || !std::isfinite(p)) return fail(OPGX_USAGE, "p must be positive and finite");
  job->spec.p = p;
  return OPGX_OK;
}

opgx_status opgx_job_set_dims(opgx_job* job, const int* dims, size_t count) {
  OPGX_REQUIRE(job && dims && count > 0, "dims must be a non-empty array");
  std::vector<int> v(dims, dims + count);
  for (int n : v)
    if (n < 1) return fail(OPGX_USAGE, "dims must be >= 1");
  job->spec.dims = std::move(v);
  return OPGX_OK;
}

opgx_status opgx_job_set_interval(opgx_job* job, double lo, double hi) {
  OPGX_REQUIRE(job, "job is null");
  return guarded([&] {
    opgx::Interval k = opgx::Interval::closed(lo, hi);
    k.closed_hi = std::isfinite(hi);
    k.validate();
    job->spec.k = k;
  });
}

opgx_status opgx_job_set_tolerance(opgx_job* job, double atol, double rtol) {
  OPGX_REQUIRE(job, "job is null");
  return guarded([&] {
    opgx::ToleranceConfig tol{atol, rtol};
    tol.validate();
    job->spec.tol = tol;
  });
}

opgx_status opgx_job_set_seed(opgx_job* job, uint64_t seed) {
  OPGX_REQUIRE(job, "job is null");
  job->spec.seed = seed;
  return OPGX_OK;
}

opgx_status opgx_job_set_trials(opgx_job* job, int trials) {
  OPGX_REQUIRE(job, "job is null");
  if (trials < 1) return fail(OPGX_USAGE, "trials must be >= 1");
  job->spec.trials = trials;
  return OPGX_OK;
}

opgx_status opgx_job_set_param(opgx_job* job, const char* name, double value) {
  OPGX_REQUIRE(job && name, "null argument");
  return guarded([&] { job->spec.params.set(name, value); });
}

opgx_status opgx_job_set_search(opgx_job* job, uint64_t budget, int restarts, int perturb_steps,
                                double perturb_scale) {
  OPGX_REQUIRE(job, "job is null");
  return guarded([&] {
    opgx::SearchConfig cfg = job->spec.search;
    cfg.budget = budget;
    cfg.restarts = restarts;
    cfg.perturb_steps = perturb_steps;
    cfg.perturb_scale = perturb_scale;
    cfg.validate();
    job->spec.search = cfg;
  });
}

opgx_status opgx_job_set_witness_dir(opgx_job* job, const char* dir) {
  OPGX_REQUIRE(job, "job is null");
  if (dir && *dir) job->witness_dir = dir;
  else job->witness_dir.reset();
  return OPGX_OK;
}

opgx_status opgx_check(opgx_session* session, const opgx_job* job, opgx_result** out) {
  OPGX_REQUIRE(session && job && out, "null argument");
  return guarded([&] {
    const opgx::CheckReport rep = opgx::run_check(job->spec, run_options(session, job));
    auto r = new opgx_result();
    r->exit_code = rep.exit_code;
    r->summary = rep.summary;
    r->jsonl = opgx::records_to_jsonl(rep.records);
    r->tally = rep.tally;
    *out = r;
  });
}

opgx_status opgx_falsify(opgx_session* session, const opgx_job* job, opgx_result** out) {
  OPGX_REQUIRE(session && job && out, "null argument");
  return guarded([&] {
    const opgx::FalsifyReport rep = opgx::run_falsify(job->spec, run_options(session, job));
    auto r = new opgx_result();
    r->exit_code = rep.exit_code;
    r->summary = rep.summary;
    if (rep.witness) r->witness = rep.witness->dump(2) + "\n";
    r->tally.trials = static_cast<int>(rep.result.evaluations);
    r->tally.failed = rep.witness ? 1 : 0;
    r->tally.certified = r->tally.failed;
    if (rep.result.best) {
      r->tally.min_gap = rep.result.best->outcome.gap();
      r->tally.max_violation = std::max(0.0, rep.result.best->violation);
    }
    *out = r;
  });
}

opgx_status opgx_classify(opgx_session* session, const opgx_job* job, const double* ratios, size_t count,
                          opgx_result** out) {
  OPGX_REQUIRE(session && job && out && (ratios || count == 0), "null argument");
  return guarded([&] {
    opgx::JobSpec spec = job->spec;
    spec.sweep_ratios.assign(ratios, ratios + count);
    const opgx::ClassifyReport rep = opgx::run_classify(spec, run_options(session, job));
    auto r = new opgx_result();
    r->exit_code = rep.exit_code;
    r->summary = rep.summary;
    if (rep.witness) r->witness = rep.witness->dump(2) + "\n";
    for (const opgx::ClassifyRow& row : rep.rows) {
      ++r->tally.trials;
      (row.violated ? r->tally.failed : r->tally.held)++;
      r->tally.max_violation = std::max(r->tally.max_violation, row.best_violation);
    }
    *out = r;
  });
}

opgx_status opgx_replay_witness(opgx_session* session, const char* path, opgx_result** out) {
  OPGX_REQUIRE(session && path && out, "null argument");
  return guarded([&] {
    const opgx::ReplayReport rep = opgx::replay_witness_file(path);
    auto r = new opgx_result();
    r->exit_code = rep.exit_code;
    r->summary = rep.summary;
    r->jsonl = rep.record.to_json().dump() + "\n";
    r->tally.add(rep.record);
    *out = r;
  });
}

opgx_status opgx_suite_run(opgx_session* session, const char* config_path, opgx_result** out) {
  OPGX_REQUIRE(session && config_path && out, "null argument");
  return guarded([&] {
    const opgx::SuiteConfig cfg = opgx::SuiteConfig::load(config_path);
    const opgx::SuiteReport rep = opgx::run_suite(cfg, run_options(session, nullptr));
    auto r = new opgx_result();
    r->exit_code = rep.exit_code;
    r->summary = rep.summary;
    r->jsonl = rep.jsonl();
    r->csv = rep.csv;
    for (const opgx::SuiteJobResult& j : rep.jobs) {
      r->tally.trials += j.tally.trials;
      r->tally.held += j.tally.held;
      r->tally.failed += j.tally.failed;
      r->tally.skipped += j.tally.skipped;
      r->tally.numerical += j.tally.numerical;
      if (j.tally.min_gap) r->tally.min_gap = r->tally.min_gap ? std::min(*r->tally.min_gap, *j.tally.min_gap) : *j.tally.min_gap;
      r->tally.max_violation = std::max(r->tally.max_violation, j.tally.max_violation);
    }
    *out = r;
  });
}

void opgx_result_destroy(opgx_result* result) {
  delete result;
}

int opgx_result_exit_code(const opgx_result* result) {
  return result ? result->exit_code : opgx::exit_code::usage;
}

const char* opgx_result_summary(const opgx_result* result) {
  return result ? result->summary.c_str() : "";
}

const char* opgx_result_jsonl(const opgx_result* result) {
  return result ? result->jsonl.c_str() : "";
}

const char* opgx_result_csv(const opgx_result* result) {
  return result ? result->csv.c_str() : "";
}

const char* opgx_result_witness(const opgx_result* result) {
  return result ? result->witness.c_str() : "";
}

opgx_status opgx_result_counts(const opgx_result* result, int* held, int* failed, int* skipped, int* numerical) {
  OPGX_REQUIRE(result, "result is null");
  if (held) *held = result->tally.held;
  if (failed) *failed = result->tally.failed;
  if (skipped) *skipped = result->tally.skipped;
  if (numerical) *numerical = result->tally.numerical;
  return OPGX_OK;
}

int opgx_result_min_gap(const opgx_result* result, double* out) {
  if (!result || !out || !result->tally.min_gap) return 0;
  *out = *result->tally.min_gap;
  return 1;
}

double opgx_result_max_violation(const opgx_result* result) {
  return result ? result->tally.max_violation : 0.0;
}

opgx_status opgx_loewner_gap(const double* x, const double* y, int n, double* gap) {
  OPGX_REQUIRE(x && y && gap && n >= 1, "null argument or n < 1");
  return guarded([&] {
    auto load = [n](const double* a) {
      opgx::CMatrix m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = opgx::Complex(a[2 * (i * n + j)], a[2 * (i * n + j) + 1]);
      return opgx::HermitianMatrix(m);
    };
    *gap = opgx::loewner_compare(load(x), load(y)).gap;
  });
}

opgx_status opgx_classify_power(double s, double p, int* member) {
  OPGX_REQUIRE(member, "member is null");
  return guarded([&] { *member = opgx::classify_power_function(s, p).member ? 1 : 0; });
}

}  // extern "C"
