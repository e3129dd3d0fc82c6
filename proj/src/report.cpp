#include "opgx/report.hpp"

#include "opgx/errors.hpp"
#include "opgx/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace opgx {

using json = nlohmann::json;

namespace {

std::string join_dims(const std::vector<int>& dims, char sep) {
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(dims[i]);
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string describe(const JobSpec& job) {
  std::ostringstream os;
  os << job.id << ": " << to_string(job.inequality) << " f=" << job.f << " h=" << job.h
     << " p=" << format_double(job.p) << " K=" << job.interval().to_string() << " dims=" << join_dims(job.dims, ',')
     << " seed=" << job.seed;
  return os.str();
}

std::string witness_file_name(const std::string& dir, const std::string& job, int trial) {
  return (std::filesystem::path(dir) / (job + "-trial" + std::to_string(trial) + ".json")).string();
}

TrialRecord run_trial(const Problem& problem, const JobSpec& job, int trial, const RunOptions& opts) {
  TrialRecord r;
  r.job = job.id;
  r.inequality = job.inequality;
  r.trial = trial;
  r.seed = SeedSpec{job.seed, static_cast<std::uint64_t>(trial)};
  r.n = job.dims[static_cast<std::size_t>(trial) % job.dims.size()];
  Rng rng = r.seed.engine();
  try {
    const Draft draft = draw(problem, r.n, rng);
    const CheckOutcome c = evaluate(problem, draft.operands);
    r.gap = c.gap();
    r.scale = c.verdict.scale;
    r.band = c.verdict.band;
    r.certified = c.certified_violation();
    r.exploratory = c.exploratory;
    r.wall_time = c.wall_time;
    r.status = c.holds() ? TrialRecord::Status::held : TrialRecord::Status::failed;
    if (!c.holds() && opts.witness_dir) {
      const std::string path = witness_file_name(*opts.witness_dir, job.id, trial);
      write_text_file(path, witness_to_json(problem, draft.operands, r.seed, c).dump(2) + "\n");
      r.witness_path = path;
    }
  } catch (const HypothesisError& e) {
    r.status = TrialRecord::Status::hypothesis;
    r.detail = e.what();
  } catch (const NumericalError& e) {
    r.status = TrialRecord::Status::numerical;
    r.detail = e.what();
  }
  return r;
}

int check_exit_code(const JobTally& t) {
  if (t.failed - t.exploratory_failures > 0) return exit_code::violation;
  if (t.numerical > 0) return exit_code::numerical;
  if (t.skipped > 0) return exit_code::hypothesis;
  return exit_code::ok;
}

std::string tally_summary(const JobTally& t) {
  std::ostringstream os;
  os << "  trials " << t.trials << ": held " << t.held << ", failed " << t.failed << " (certified " << t.certified
     << ")";
  if (t.exploratory_failures) os << " [exploratory " << t.exploratory_failures << "]";
  os << ", hypothesis-skipped " << t.skipped << ", numerical " << t.numerical << "\n";
  os << "  min gap " << (t.min_gap ? format_double(*t.min_gap) : std::string("n/a")) << ", max violation "
     << format_double(t.max_violation) << "\n";
  return os.str();
}

const char* expectation_name(Expectation e) {
  switch (e) {
    case Expectation::holds: return "holds";
    case Expectation::violation: return "violation";
    case Expectation::explore: return "explore";
    case Expectation::agree: return "agree";
  }
  return "?";
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::io:
      return exit_code::usage;
    case ErrorKind::hypothesis:
      return exit_code::hypothesis;
    default:
      return exit_code::numerical;
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorKind::io, "write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- JobSpec ---------------------------------------------------------------

Expectation JobSpec::expectation() const {
  if (expect) return *expect;
  if (mode == JobMode::classify) return Expectation::agree;
  if (inequality == InequalityId::chaotic_mean) return Expectation::explore;
  return Expectation::holds;
}

Problem JobSpec::problem() const {
  return make_problem(inequality, f, h, p, interval(), tol, params);
}

SearchConfig JobSpec::search_config(unsigned threads) const {
  SearchConfig cfg = search;
  cfg.dims = dims;
  cfg.master_seed = seed;
  cfg.threads = threads;
  return cfg;
}

void JobSpec::validate() const {
  if (id.empty()) throw UsageError("job id must not be empty");
  if (trials < 1) throw UsageError("trials must be >= 1");
  if (dims.empty()) throw UsageError("dims must not be empty");
  for (int n : dims)
    if (n < 1) throw UsageError("dims must be >= 1");
  if (!(p > 0.0)) throw UsageError("p must be positive");
  tol.validate();
  interval().validate();
  for (double r : sweep_ratios)
    if (!(r > 0.0)) throw UsageError("sweep ratios must be positive");
}

// ---- records ---------------------------------------------------------------

std::string_view to_string(TrialRecord::Status s) {
  switch (s) {
    case TrialRecord::Status::held: return "held";
    case TrialRecord::Status::failed: return "failed";
    case TrialRecord::Status::hypothesis: return "hypothesis";
    case TrialRecord::Status::numerical: return "numerical";
  }
  return "?";
}

json TrialRecord::to_json() const {
  const bool evaluated = status == Status::held || status == Status::failed;
  json j{{"schema_version", kRecordSchemaVersion},
         {"job", job},
         {"inequality", std::string(opgx::to_string(inequality))},
         {"trial", trial},
         {"n", n},
         {"master_seed", seed.master_seed},
         {"trial_seed", seed.derived()},
         {"status", std::string(opgx::to_string(status))},
         {"gap", evaluated ? json(gap) : json()},
         {"scale", evaluated ? json(scale) : json()},
         {"band", evaluated ? json(band) : json()},
         {"holds", status == Status::held},
         {"certified", certified},
         {"hypothesis_status", status == Status::hypothesis ? "violated: " + detail : std::string("ok")},
         {"exploratory", exploratory},
         {"wall_time", wall_time}};
  if (status == Status::numerical) j["error"] = detail;
  if (witness_path) j["witness"] = *witness_path;
  return j;
}

std::string records_to_jsonl(const std::vector<TrialRecord>& records) {
  std::string out;
  for (const TrialRecord& r : records) out += r.to_json().dump() + "\n";
  return out;
}

void JobTally::add(const TrialRecord& r) {
  ++trials;
  switch (r.status) {
    case TrialRecord::Status::held:
      ++held;
      break;
    case TrialRecord::Status::failed:
      ++failed;
      if (r.certified) ++certified;
      if (r.exploratory) ++exploratory_failures;
      break;
    case TrialRecord::Status::hypothesis:
      ++skipped;
      return;
    case TrialRecord::Status::numerical:
      ++numerical;
      return;
  }
  min_gap = min_gap ? std::min(*min_gap, r.gap) : r.gap;
  max_violation = std::max(max_violation, -r.gap);
}

// ---- check -----------------------------------------------------------------

CheckReport run_check(const JobSpec& job, const RunOptions& opts) {
  job.validate();
  const Problem problem = job.problem();
  CheckReport rep;
  rep.records.resize(static_cast<std::size_t>(job.trials));
  parallel_for(rep.records.size(), opts.threads,
               [&](std::size_t i) { rep.records[i] = run_trial(problem, job, static_cast<int>(i), opts); });
  for (const TrialRecord& r : rep.records) rep.tally.add(r);
  rep.exit_code = check_exit_code(rep.tally);

  std::ostringstream os;
  os << "check " << describe(job) << "\n" << tally_summary(rep.tally);
  const auto first_skip = std::find_if(rep.records.begin(), rep.records.end(), [](const TrialRecord& r) {
    return r.status == TrialRecord::Status::hypothesis || r.status == TrialRecord::Status::numerical;
  });
  if (first_skip != rep.records.end()) os << "  first skip (trial " << first_skip->trial << "): " << first_skip->detail << "\n";
  os << "  exit " << rep.exit_code << "\n";
  rep.summary = os.str();
  return rep;
}

// ---- falsify ---------------------------------------------------------------

FalsifyReport run_falsify(const JobSpec& job, const RunOptions& opts) {
  job.validate();
  const Problem problem = job.problem();
  FalsifyReport rep;
  rep.result = falsify(problem, job.search_config(opts.threads));
  if (rep.result.witness) {
    const ViolationWitness& w = *rep.result.witness;
    rep.witness = witness_to_json(problem, w.operands, w.seed, w.outcome);
    rep.exit_code = exit_code::violation;
  }

  std::ostringstream os;
  os << "falsify " << describe(job) << "\n";
  os << "  evaluations " << rep.result.evaluations << " (rejected " << rep.result.rejected << ")\n";
  if (rep.result.best) {
    const ViolationWitness& b = *rep.result.best;
    os << "  best violation " << format_double(b.violation) << " at n=" << b.operands.n << " (restart "
       << b.seed.trial_index << ", gap " << format_double(b.outcome.gap()) << ", band "
       << format_double(b.outcome.verdict.band) << ")\n";
  }
  os << "  certified witness: " << (rep.result.witness ? "yes" : "none") << "\n";
  if (rep.result.witness && rep.result.witness->outcome.exploratory) os << "  (exploratory target)\n";
  os << "  exit " << rep.exit_code << "\n";
  rep.summary = os.str();
  return rep;
}

// ---- classify --------------------------------------------------------------

ClassifyReport run_classify(const JobSpec& job, const RunOptions& opts) {
  job.validate();
  std::vector<JobSpec> variants;
  if (job.sweep_ratios.empty()) {
    variants.push_back(job);
  } else {
    for (double ratio : job.sweep_ratios) {
      JobSpec v = job;
      v.f = "power:s=" + format_double(ratio * job.p);
      variants.push_back(std::move(v));
    }
  }

  ClassifyReport rep;
  bool disagreement = false;
  bool unpredicted_violation = false;
  for (const JobSpec& v : variants) {
    const Problem problem = v.problem();
    const ClassifyResult res = classify_empirical(problem, v.search_config(opts.threads));
    ClassifyRow row;
    row.f = problem.f_spec;
    if (const auto s = problem.setting.f().power_exponent()) row.ratio = *s / problem.p();
    row.violated = res.violated;
    row.best_violation = res.search.best ? res.search.best->violation : 0.0;
    row.prediction = res.prediction;
    row.agreement = res.agreement;
    if (row.agreement && !*row.agreement) disagreement = true;
    if (!row.agreement && row.violated) unpredicted_violation = true;
    if (res.search.witness && !rep.witness) {
      const ViolationWitness& w = *res.search.witness;
      rep.witness = witness_to_json(problem, w.operands, w.seed, w.outcome);
    }
    rep.rows.push_back(std::move(row));
  }
  rep.exit_code = disagreement ? exit_code::disagreement
                               : (unpredicted_violation ? exit_code::violation : exit_code::ok);

  std::ostringstream os;
  os << "classify " << describe(job) << "\n";
  os << "  f                      s/p      predicted   empirical      best violation  agree\n";
  for (const ClassifyRow& r : rep.rows) {
    char line[256];
    std::snprintf(line, sizeof line, "  %-22s %-8s %-11s %-14s %-15s %s\n", r.f.c_str(),
                  r.ratio ? format_double(*r.ratio).c_str() : "-",
                  r.prediction ? (r.prediction->member ? "member" : "nonmember") : "-",
                  r.violated ? "violated" : "no_violation", format_double(r.best_violation).c_str(),
                  r.agreement ? (*r.agreement ? "yes" : "NO") : "-");
    os << line;
  }
  if (disagreement) os << "  DISAGREEMENT between empirical verdict and the power-function criterion\n";
  os << "  exit " << rep.exit_code << "\n";
  rep.summary = os.str();
  return rep;
}

// ---- replay ----------------------------------------------------------------

ReplayReport replay_witness(const json& witness) {
  const Witness w = witness_from_json(witness);
  ReplayReport rep;
  rep.recorded_gap = w.recorded_gap;
  TrialRecord& r = rep.record;
  r.job = "replay";
  r.inequality = w.problem.id;
  r.trial = static_cast<int>(w.seed.trial_index);
  r.n = w.operands.n;
  r.seed = w.seed;
  std::ostringstream os;
  os << "replay " << to_string(w.problem.id) << " f=" << w.problem.f_spec << " h=" << w.problem.h_spec
     << " p=" << format_double(w.problem.p()) << " n=" << w.operands.n << "\n";
  try {
    rep.outcome = evaluate(w.problem, w.operands);
    r.gap = rep.outcome.gap();
    r.scale = rep.outcome.verdict.scale;
    r.band = rep.outcome.verdict.band;
    r.certified = rep.outcome.certified_violation();
    r.exploratory = rep.outcome.exploratory;
    r.wall_time = rep.outcome.wall_time;
    r.status = rep.outcome.holds() ? TrialRecord::Status::held : TrialRecord::Status::failed;
    os << "  gap " << format_double(r.gap) << " (band " << format_double(r.band) << ")";
    if (rep.recorded_gap) os << ", recorded " << format_double(*rep.recorded_gap);
    os << "\n  " << (rep.outcome.holds() ? "holds" : (r.certified ? "certified violation" : "violation within band"))
       << "\n";
    rep.exit_code = (rep.outcome.holds() || r.exploratory) ? exit_code::ok : exit_code::violation;
  } catch (const HypothesisError& e) {
    r.status = TrialRecord::Status::hypothesis;
    r.detail = e.what();
    os << "  hypothesis violated: " << e.what() << "\n";
    rep.exit_code = exit_code::hypothesis;
  } catch (const NumericalError& e) {
    r.status = TrialRecord::Status::numerical;
    r.detail = e.what();
    os << "  numerical failure: " << e.what() << "\n";
    rep.exit_code = exit_code::numerical;
  }
  os << "  exit " << rep.exit_code << "\n";
  rep.summary = os.str();
  return rep;
}

ReplayReport replay_witness_file(const std::string& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
  return replay_witness(j);
}

// ---- suite -----------------------------------------------------------------

namespace {

const std::set<std::string> kJobKeys{"id",   "inequality", "f",      "h",      "p",    "dims",  "K", "trials",
                                     "seed", "tol",        "params", "mode",   "expect", "search", "sweep"};

template <class T>
T get_field(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(where + "." + key + ": missing or wrong type");
  }
}

Interval interval_field(const json& j, const std::string& where) {
  Interval k;
  if (j.is_array() && j.size() == 2 && j[0].is_number()) {
    k.lo = j[0].get<double>();
    if (j[1].is_number()) k.hi = j[1].get<double>();
    else if (!(j[1].is_string() && j[1].get<std::string>() == "inf")) throw UsageError(where + ".K[1]: expected a number or \"inf\"");
  } else if (j.is_object()) {
    k.lo = get_field<double>(j, "lo", where + ".K");
    if (j.contains("hi") && !j["hi"].is_string()) k.hi = get_field<double>(j, "hi", where + ".K");
    k.closed_lo = j.value("closed_lo", true);
    k.closed_hi = j.value("closed_hi", true);
  } else {
    throw UsageError(where + ".K: expected [lo, hi] or {\"lo\":..,\"hi\":..}");
  }
  try {
    k.validate();
  } catch (const Error& e) {
    throw UsageError(where + ".K: " + e.what());
  }
  return k;
}

JobSpec job_from_json(const json& j, std::size_t index, std::uint64_t master_seed) {
  const std::string where = "jobs[" + std::to_string(index) + "]";
  if (!j.is_object()) throw UsageError(where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!kJobKeys.count(key)) throw UsageError(where + ": unknown field '" + key + "'");

  JobSpec job;
  job.id = j.contains("id") ? get_field<std::string>(j, "id", where) : "job" + std::to_string(index);
  const std::string ineq = get_field<std::string>(j, "inequality", where);
  const auto id = parse_inequality(ineq);
  if (!id) throw UsageError(where + ".inequality: unknown inequality '" + ineq + "'");
  job.inequality = *id;
  if (j.contains("f")) job.f = get_field<std::string>(j, "f", where);
  if (j.contains("h")) job.h = get_field<std::string>(j, "h", where);
  if (j.contains("p")) job.p = get_field<double>(j, "p", where);
  if (j.contains("dims")) {
    job.dims = j["dims"].is_number() ? std::vector<int>{get_field<int>(j, "dims", where)}
                                      : get_field<std::vector<int>>(j, "dims", where);
  }
  if (j.contains("K")) job.k = interval_field(j["K"], where);
  if (j.contains("trials")) job.trials = get_field<int>(j, "trials", where);
  job.seed = j.contains("seed") ? get_field<std::uint64_t>(j, "seed", where)
                                : SeedSpec{master_seed, static_cast<std::uint64_t>(index)}.derived();
  if (j.contains("tol")) {
    const json& t = j["tol"];
    try {
      if (t.is_array() && t.size() == 2) {
        job.tol.atol = t[0].get<double>();
        job.tol.rtol = t[1].get<double>();
      } else {
        job.tol.atol = t.at("atol").get<double>();
        job.tol.rtol = t.at("rtol").get<double>();
      }
    } catch (const json::exception&) {
      throw UsageError(where + ".tol: expected [atol, rtol] or {\"atol\":..,\"rtol\":..}");
    }
  }
  if (j.contains("params")) {
    try {
      job.params = TrialParams::from_json(j["params"]);
    } catch (const json::exception&) {
      throw UsageError(where + ".params: wrong value type");
    } catch (const UsageError& e) {
      throw UsageError(where + ".params: " + e.what());
    }
  }
  if (j.contains("mode")) {
    const std::string m = get_field<std::string>(j, "mode", where);
    if (m == "check") job.mode = JobMode::check;
    else if (m == "falsify") job.mode = JobMode::falsify;
    else if (m == "classify") job.mode = JobMode::classify;
    else throw UsageError(where + ".mode: expected check, falsify or classify");
  }
  if (j.contains("expect")) {
    const std::string e = get_field<std::string>(j, "expect", where);
    if (e == "holds") job.expect = Expectation::holds;
    else if (e == "violation") job.expect = Expectation::violation;
    else if (e == "explore") job.expect = Expectation::explore;
    else if (e == "agree") job.expect = Expectation::agree;
    else throw UsageError(where + ".expect: expected holds, violation, explore or agree");
  }
  if (j.contains("search")) {
    const json& s = j["search"];
    const std::string sw = where + ".search";
    if (!s.is_object()) throw UsageError(sw + ": expected an object");
    for (const auto& [key, _] : s.items()) {
      if (key == "budget") job.search.budget = get_field<std::uint64_t>(s, "budget", sw);
      else if (key == "restarts") job.search.restarts = get_field<int>(s, "restarts", sw);
      else if (key == "perturb_steps") job.search.perturb_steps = get_field<int>(s, "perturb_steps", sw);
      else if (key == "perturb_scale") job.search.perturb_scale = get_field<double>(s, "perturb_scale", sw);
      else throw UsageError(sw + ": unknown field '" + key + "'");
    }
  }
  if (j.contains("sweep")) job.sweep_ratios = get_field<std::vector<double>>(j, "sweep", where);

  try {
    job.validate();
    (void)parse_function(job.f, job.interval());
    (void)parse_weight(job.h);
    if (job.mode != JobMode::check) job.search_config(1).validate();
  } catch (const UsageError& e) {
    throw UsageError(where + ": " + e.what());
  }
  return job;
}

}  // namespace

SuiteConfig SuiteConfig::from_json(const json& j) {
  if (!j.is_object()) throw UsageError("suite config: expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "master_seed" && key != "jobs" && key != "description")
      throw UsageError("suite config: unknown field '" + key + "'");
  SuiteConfig cfg;
  if (j.contains("master_seed")) cfg.master_seed = get_field<std::uint64_t>(j, "master_seed", "suite config");
  if (!j.contains("jobs") || !j["jobs"].is_array()) throw UsageError("suite config: 'jobs' must be an array");
  if (j["jobs"].empty()) throw UsageError("suite config: job list is empty");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < j["jobs"].size(); ++i) {
    JobSpec job = job_from_json(j["jobs"][i], i, cfg.master_seed);
    if (!ids.insert(job.id).second) throw UsageError("jobs[" + std::to_string(i) + "].id: duplicate id '" + job.id + "'");
    cfg.jobs.push_back(std::move(job));
  }
  return cfg;
}

SuiteConfig SuiteConfig::load(const std::string& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
  try {
    return from_json(j);
  } catch (const UsageError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::string SuiteReport::jsonl() const {
  return records_to_jsonl(records);
}

SuiteReport run_suite(const SuiteConfig& cfg, const RunOptions& opts) {
  if (cfg.jobs.empty()) throw UsageError("suite config: job list is empty");
  SuiteReport rep;
  bool numerical_failure = false;
  bool unmet = false;
  std::ostringstream os;

  for (const JobSpec& job : cfg.jobs) {
    SuiteJobResult res;
    res.job = job;
    const Expectation expect = job.expectation();
    try {
      switch (job.mode) {
        case JobMode::check: {
          CheckReport c = run_check(job, opts);
          res.tally = c.tally;
          const JobTally& t = c.tally;
          switch (expect) {
            case Expectation::violation: res.expectation_met = t.certified > 0; break;
            case Expectation::explore: res.expectation_met = t.numerical == 0; break;
            default: res.expectation_met = t.failed == 0 && t.skipped == 0 && t.numerical == 0; break;
          }
          os << c.summary;
          for (TrialRecord& r : c.records) rep.records.push_back(std::move(r));
          break;
        }
        case JobMode::falsify: {
          const FalsifyReport f = run_falsify(job, opts);
          JobTally& t = res.tally;
          t.trials = static_cast<int>(f.result.evaluations);
          if (f.result.best) {
            const ViolationWitness& b = *f.result.best;
            TrialRecord r;
            r.job = job.id;
            r.inequality = job.inequality;
            r.trial = static_cast<int>(b.seed.trial_index);
            r.n = b.operands.n;
            r.seed = b.seed;
            r.gap = b.outcome.gap();
            r.scale = b.outcome.verdict.scale;
            r.band = b.outcome.verdict.band;
            r.certified = b.certified;
            r.exploratory = b.outcome.exploratory;
            r.status = b.outcome.holds() ? TrialRecord::Status::held : TrialRecord::Status::failed;
            if (f.witness && opts.witness_dir) {
              const std::string path = witness_file_name(*opts.witness_dir, job.id, r.trial);
              write_text_file(path, f.witness->dump(2) + "\n");
              r.witness_path = path;
            }
            t.min_gap = r.gap;
            t.max_violation = std::max(0.0, b.violation);
            rep.records.push_back(std::move(r));
          }
          t.failed = f.result.witness ? 1 : 0;
          t.certified = t.failed;
          t.held = 1 - t.failed;
          switch (expect) {
            case Expectation::violation: res.expectation_met = f.result.witness.has_value(); break;
            case Expectation::explore: res.expectation_met = true; break;
            default: res.expectation_met = !f.result.witness; break;
          }
          os << f.summary;
          break;
        }
        case JobMode::classify: {
          const ClassifyReport c = run_classify(job, opts);
          JobTally& t = res.tally;
          bool all_agree = true;
          bool any_prediction = false;
          for (const ClassifyRow& row : c.rows) {
            ++t.trials;
            (row.violated ? t.failed : t.held)++;
            t.max_violation = std::max(t.max_violation, row.best_violation);
            t.min_gap = t.min_gap ? std::min(*t.min_gap, -row.best_violation) : -row.best_violation;
            if (row.agreement) {
              any_prediction = true;
              all_agree = all_agree && *row.agreement;
            }
          }
          t.certified = t.failed;
          if (any_prediction) res.agreement = all_agree;
          switch (expect) {
            case Expectation::violation: res.expectation_met = t.failed > 0; break;
            case Expectation::explore: res.expectation_met = true; break;
            case Expectation::holds: res.expectation_met = t.failed == 0; break;
            case Expectation::agree: res.expectation_met = res.agreement.value_or(false); break;
          }
          os << c.summary;
          break;
        }
      }
    } catch (const NumericalError& e) {
      res.error = e.what();
      res.expectation_met = false;
      numerical_failure = true;
      os << "job " << job.id << ": numerical failure: " << e.what() << "\n";
    }
    os << "  expectation " << expectation_name(expect) << ": " << (res.expectation_met ? "met" : "NOT MET") << "\n";
    unmet = unmet || !res.expectation_met;
    rep.jobs.push_back(std::move(res));
  }

  // Records were appended job by job, each job already in trial order.

  std::ostringstream csv;
  csv << "job_id,inequality,f,h,p,dims,trials,held,failed,skipped,min_gap,max_violation,agreement,expectation_met\n";
  int met = 0;
  for (const SuiteJobResult& r : rep.jobs) {
    const JobTally& t = r.tally;
    csv << csv_field(r.job.id) << ',' << to_string(r.job.inequality) << ',' << csv_field(r.job.f) << ','
        << csv_field(r.job.h) << ',' << format_double(r.job.p) << ',' << join_dims(r.job.dims, ';') << ','
        << t.trials << ',' << t.held << ',' << t.failed << ',' << t.skipped << ','
        << (t.min_gap ? format_double(*t.min_gap) : std::string()) << ',' << format_double(t.max_violation) << ','
        << (r.agreement ? (*r.agreement ? "yes" : "no") : "") << ',' << (r.expectation_met ? "yes" : "no") << '\n';
    met += r.expectation_met ? 1 : 0;
  }
  rep.csv = csv.str();
  rep.exit_code = numerical_failure ? exit_code::numerical : (unmet ? exit_code::violation : exit_code::ok);
  os << "suite: " << met << "/" << rep.jobs.size() << " jobs met expectations; exit " << rep.exit_code << "\n";
  rep.summary = os.str();
  return rep;
}

}  // namespace opgx
