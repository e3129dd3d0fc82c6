// opgx: command-line front end over the C API.
//
//   opgx check    --ineq definition --f power:s=1.5 --h identity --p 1 --n 3 --trials 1000 --seed 42
//   opgx check    --witness w.json
//   opgx falsify  --ineq definition --f power:s=3 --p 1 --budget 20000 --seed 7 --out-witness w.json
//   opgx classify --ineq definition --p 1 --sweep 0.5,1,1.5,2,2.5
//   opgx suite    configs/full_suite.json --out records.jsonl --csv summary.csv

#include "opgx/opgx.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitHypothesis = 4;

int exit_for(opgx_status s) {
  switch (s) {
    case OPGX_OK: return 0;
    case OPGX_HYPOTHESIS: return kExitHypothesis;
    case OPGX_NUMERICAL:
    case OPGX_INTERNAL: return kExitNumerical;
    default: return kExitUsage;
  }
}

int report_error(opgx_status s) {
  std::cerr << "opgx: " << opgx_status_string(s) << ": " << opgx_last_error() << "\n";
  return exit_for(s);
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "opgx: cannot write '" << path << "'\n";
    return false;
  }
  return true;
}

struct ProblemFlags {
  std::string ineq;
  std::string f = "power:s=1.5";
  std::string h = "identity";
  double p = 1.0;
  std::vector<int> dims;
  std::vector<std::string> k;
  int trials = 100;
  std::uint64_t seed = 0;
  std::vector<double> tol;
  std::vector<std::string> params;
  std::string witness_dir;
  unsigned threads = 0;

  void attach(CLI::App* cmd, bool ineq_required) {
    auto* opt = cmd->add_option("--ineq", ineq, "Inequality id (definition, jensen, cdj, ...)");
    if (ineq_required) opt->required();
    cmd->add_option("--f", f, "Scalar function: power:s=<s>, poly:a0,a1,..., sum(f,g), scale:<c>(f)");
    cmd->add_option("--h", h, "Weight function: identity, power:s=<s>, one, recip, cubic, half_cubic");
    cmd->add_option("--p", p, "Power-mean exponent p > 0");
    cmd->add_option("--n", dims, "Matrix dimensions, cycled over trials")->delimiter(',');
    cmd->add_option("--K", k, "Spectral interval lo,hi (hi may be inf)")->delimiter(',')->expected(2);
    cmd->add_option("--seed", seed, "Master seed");
    cmd->add_option("--tol", tol, "atol,rtol")->delimiter(',')->expected(2);
    cmd->add_option("--param", params, "Extra knob name=value (k, rank, m_kraus, p1, p2, alpha, ...)");
    cmd->add_option("--threads", threads, "Worker threads (default OPGX_THREADS or all cores)");
  }

  opgx_status build(opgx_job** out) const {
    opgx_job* job = nullptr;
    opgx_status s = opgx_job_create(ineq.c_str(), &job);
    if (s != OPGX_OK) return s;
    auto fail = [&](opgx_status st) {
      opgx_job_destroy(job);
      return st;
    };
    if (!k.empty()) {
      double lo = 0.0, hi = 0.0;
      try {
        lo = std::stod(k[0]);
        hi = k[1] == "inf" ? std::numeric_limits<double>::infinity() : std::stod(k[1]);
      } catch (const std::exception&) {
        std::cerr << "opgx: --K expects two numbers\n";
        return fail(OPGX_USAGE);
      }
      if ((s = opgx_job_set_interval(job, lo, hi)) != OPGX_OK) return fail(s);
    }
    if ((s = opgx_job_set_function(job, f.c_str())) != OPGX_OK) return fail(s);
    if ((s = opgx_job_set_weight(job, h.c_str())) != OPGX_OK) return fail(s);
    if ((s = opgx_job_set_p(job, p)) != OPGX_OK) return fail(s);
    if (!dims.empty() && (s = opgx_job_set_dims(job, dims.data(), dims.size())) != OPGX_OK) return fail(s);
    if ((s = opgx_job_set_trials(job, trials)) != OPGX_OK) return fail(s);
    if ((s = opgx_job_set_seed(job, seed)) != OPGX_OK) return fail(s);
    if (!tol.empty() && (s = opgx_job_set_tolerance(job, tol[0], tol[1])) != OPGX_OK) return fail(s);
    for (const std::string& kv : params) {
      const auto eq = kv.find('=');
      double value = 0.0;
      try {
        if (eq == std::string::npos) throw std::invalid_argument(kv);
        value = std::stod(kv.substr(eq + 1));
      } catch (const std::exception&) {
        std::cerr << "opgx: --param expects name=value, got '" << kv << "'\n";
        return fail(OPGX_USAGE);
      }
      if ((s = opgx_job_set_param(job, kv.substr(0, eq).c_str(), value)) != OPGX_OK) return fail(s);
    }
    if (!witness_dir.empty() && (s = opgx_job_set_witness_dir(job, witness_dir.c_str())) != OPGX_OK) return fail(s);
    *out = job;
    return OPGX_OK;
  }
};

struct SearchFlags {
  std::uint64_t budget = 20000;
  int restarts = 40;
  int steps = -1;
  double scale = 0.1;
  std::string out_witness;

  void attach(CLI::App* cmd) {
    cmd->add_option("--budget", budget, "Total oracle evaluations");
    cmd->add_option("--restarts", restarts, "Independent hill-climbing restarts");
    cmd->add_option("--steps", steps, "Perturbation steps per restart (default budget/restarts - 1)");
    cmd->add_option("--scale", scale, "Initial perturbation scale");
    cmd->add_option("--out-witness", out_witness, "Write the certified witness here");
  }
};

// Prints the summary, writes the requested artifacts and returns the exit code.
int finish(opgx_result* r, const std::string& jsonl_path, const std::string& witness_path,
           const std::string& csv_path = {}) {
  std::cout << opgx_result_summary(r);
  int code = opgx_result_exit_code(r);
  if (!jsonl_path.empty() && !write_file(jsonl_path, opgx_result_jsonl(r))) code = kExitUsage;
  if (!csv_path.empty() && !write_file(csv_path, opgx_result_csv(r))) code = kExitUsage;
  const std::string witness = opgx_result_witness(r);
  if (!witness_path.empty() && !witness.empty()) {
    if (write_file(witness_path, witness)) std::cout << "witness written to " << witness_path << "\n";
    else code = kExitUsage;
  }
  opgx_result_destroy(r);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checker for operator (p,h)-convexity inequalities"};
  app.require_subcommand(1);
  // --h names the weight function, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");

  ProblemFlags check_flags;
  std::string out_path, witness_file;
  auto* check = app.add_subcommand("check", "Run seeded trials of one inequality, or replay a witness");
  check->set_help_flag("--help", "Print this help message and exit");
  check_flags.attach(check, false);
  check->add_option("--trials", check_flags.trials, "Number of trials");
  check->add_option("--out", out_path, "Write per-trial JSONL records here");
  check->add_option("--witness", witness_file, "Replay a witness file instead of sampling");
  check->add_option("--witness-dir", check_flags.witness_dir, "Write a witness for every failed trial");

  ProblemFlags falsify_flags;
  SearchFlags falsify_search;
  auto* falsify = app.add_subcommand("falsify", "Search for a certified counterexample");
  falsify->set_help_flag("--help", "Print this help message and exit");
  falsify_flags.attach(falsify, true);
  falsify_search.attach(falsify);

  ProblemFlags classify_flags;
  SearchFlags classify_search;
  std::vector<double> sweep;
  auto* classify = app.add_subcommand("classify", "Compare searched verdicts with the power-function criterion");
  classify->set_help_flag("--help", "Print this help message and exit");
  classify_flags.attach(classify, false);
  classify_search.attach(classify);
  classify->add_option("--sweep", sweep, "s/p ratios to sweep with f = t^s")->delimiter(',');

  std::string suite_config, suite_out, suite_csv;
  unsigned suite_threads = 0;
  auto* suite = app.add_subcommand("suite", "Run a JSON suite configuration");
  suite->set_help_flag("--help", "Print this help message and exit");
  suite->add_option("config", suite_config, "Suite config path")->required();
  suite->add_option("--out", suite_out, "Write JSONL records here");
  suite->add_option("--csv", suite_csv, "Write the per-job CSV summary here");
  suite->add_option("--threads", suite_threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  opgx_session* session = nullptr;
  if (opgx_status s = opgx_session_create(&session); s != OPGX_OK) return report_error(s);
  struct SessionGuard {
    opgx_session* s;
    ~SessionGuard() { opgx_session_destroy(s); }
  } guard{session};

  opgx_result* result = nullptr;
  opgx_status s = OPGX_OK;

  if (*check) {
    opgx_session_set_threads(session, check_flags.threads);
    if (!witness_file.empty()) {
      if ((s = opgx_replay_witness(session, witness_file.c_str(), &result)) != OPGX_OK) return report_error(s);
      return finish(result, out_path, {});
    }
    if (check_flags.ineq.empty()) {
      std::cerr << "opgx: check needs --ineq or --witness\n";
      return kExitUsage;
    }
    if (check_flags.dims.empty()) check_flags.dims = {3};
    opgx_job* job = nullptr;
    if ((s = check_flags.build(&job)) != OPGX_OK) return report_error(s);
    s = opgx_check(session, job, &result);
    opgx_job_destroy(job);
    if (s != OPGX_OK) return report_error(s);
    return finish(result, out_path, {});
  }

  auto run_search = [&](ProblemFlags& flags, const SearchFlags& search, bool is_classify) {
    opgx_session_set_threads(session, flags.threads);
    if (flags.ineq.empty()) flags.ineq = "definition";
    if (flags.dims.empty()) flags.dims = {2, 3};
    opgx_job* job = nullptr;
    if ((s = flags.build(&job)) != OPGX_OK) return report_error(s);
    s = opgx_job_set_search(job, search.budget, search.restarts, search.steps, search.scale);
    if (s == OPGX_OK) {
      s = is_classify ? opgx_classify(session, job, sweep.data(), sweep.size(), &result)
                      : opgx_falsify(session, job, &result);
    }
    opgx_job_destroy(job);
    if (s != OPGX_OK) return report_error(s);
    return finish(result, {}, search.out_witness);
  };

  if (*falsify) return run_search(falsify_flags, falsify_search, false);
  if (*classify) return run_search(classify_flags, classify_search, true);

  opgx_session_set_threads(session, suite_threads);
  if ((s = opgx_suite_run(session, suite_config.c_str(), &result)) != OPGX_OK) return report_error(s);
  return finish(result, suite_out, {}, suite_csv);
}
