#pragma once

// Job execution and result emission shared by the CLI and the C API: seeded
// trial runs, counterexample searches, classification sweeps, witness replay
// and declarative suites, each producing JSONL records, an optional CSV
// summary, a plain-text report and an exit code.

#include "opgx/errors.hpp"
#include "opgx/falsifier.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace opgx {

inline constexpr int kRecordSchemaVersion = 1;

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int violation = 1;
inline constexpr int usage = 2;
inline constexpr int numerical = 3;
inline constexpr int hypothesis = 4;
inline constexpr int disagreement = 5;
}  // namespace exit_code

int exit_code_for(ErrorKind kind);

enum class JobMode { check, falsify, classify };
/// What a suite job must observe to count as met.
enum class Expectation { holds, violation, explore, agree };

struct JobSpec {
  std::string id = "job";
  InequalityId inequality = InequalityId::definition;
  std::string f = "power:s=1.5";
  std::string h = "identity";
  double p = 1.0;
  std::vector<int> dims{3};
  std::optional<Interval> k;  // unset: default_interval(inequality)
  int trials = 100;
  std::uint64_t seed = 0;
  ToleranceConfig tol;
  TrialParams params;
  JobMode mode = JobMode::check;
  std::optional<Expectation> expect;
  SearchConfig search;               // dims, seed and threads are taken from the job
  std::vector<double> sweep_ratios;  // classify: s/p values to sweep instead of f

  Interval interval() const { return k ? *k : default_interval(inequality); }
  Expectation expectation() const;
  Problem problem() const;
  SearchConfig search_config(unsigned threads) const;
  void validate() const;
};

struct TrialRecord {
  std::string job;
  InequalityId inequality = InequalityId::definition;
  int trial = 0;
  int n = 0;
  SeedSpec seed;
  enum class Status { held, failed, hypothesis, numerical } status = Status::held;
  double gap = 0.0;
  double scale = 0.0;
  double band = 0.0;
  bool certified = false;
  bool exploratory = false;
  std::string detail;  // failed hypothesis or numerical error text
  double wall_time = 0.0;
  std::optional<std::string> witness_path;

  nlohmann::json to_json() const;
};

std::string_view to_string(TrialRecord::Status s);

struct JobTally {
  int trials = 0;
  int held = 0;
  int failed = 0;
  int certified = 0;
  int skipped = 0;    // hypothesis violations
  int numerical = 0;
  std::optional<double> min_gap;
  double max_violation = 0.0;
  int exploratory_failures = 0;

  void add(const TrialRecord& r);
};

struct RunOptions {
  unsigned threads = 1;
  std::optional<std::string> witness_dir;  // failed trials write replayable witnesses here
};

struct CheckReport {
  std::vector<TrialRecord> records;
  JobTally tally;
  int exit_code = exit_code::ok;
  std::string summary;
};

CheckReport run_check(const JobSpec& job, const RunOptions& opts);

struct FalsifyReport {
  FalsifyResult result;
  std::optional<nlohmann::json> witness;  // set iff certified
  int exit_code = exit_code::ok;
  std::string summary;
};

FalsifyReport run_falsify(const JobSpec& job, const RunOptions& opts);

struct ClassifyRow {
  std::string f;
  std::optional<double> ratio;  // s/p when f is a power
  bool violated = false;
  double best_violation = 0.0;
  std::optional<PowerClassification> prediction;
  std::optional<bool> agreement;
};

struct ClassifyReport {
  std::vector<ClassifyRow> rows;
  std::optional<nlohmann::json> witness;  // first certified witness
  int exit_code = exit_code::ok;
  std::string summary;
};

ClassifyReport run_classify(const JobSpec& job, const RunOptions& opts);

struct ReplayReport {
  CheckOutcome outcome;
  std::optional<double> recorded_gap;
  TrialRecord record;
  int exit_code = exit_code::ok;
  std::string summary;
};

ReplayReport replay_witness(const nlohmann::json& witness);
ReplayReport replay_witness_file(const std::string& path);

struct SuiteConfig {
  std::uint64_t master_seed = 0;
  std::vector<JobSpec> jobs;

  /// Throws UsageError naming the offending field.
  static SuiteConfig from_json(const nlohmann::json& j);
  static SuiteConfig load(const std::string& path);
};

struct SuiteJobResult {
  JobSpec job;
  JobTally tally;
  std::optional<bool> agreement;
  bool expectation_met = false;
  std::string error;  // numerical failure that aborted the job
};

struct SuiteReport {
  std::vector<SuiteJobResult> jobs;
  std::vector<TrialRecord> records;  // sorted by (job, trial)
  int exit_code = exit_code::ok;
  std::string summary;
  std::string csv;
  std::string jsonl() const;
};

SuiteReport run_suite(const SuiteConfig& cfg, const RunOptions& opts);

std::string records_to_jsonl(const std::vector<TrialRecord>& records);
/// Shortest round-trip decimal, as used in CSV and summaries.
std::string format_double(double x);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace opgx
