#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opgx/errors.hpp"
#include "opgx/report.hpp"

#include <filesystem>
#include <sstream>

using namespace opgx;
using nlohmann::json;

namespace {

std::string suite_error(const json& j) {
  try {
    SuiteConfig::from_json(j);
  } catch (const UsageError& e) {
    return e.what();
  }
  return "";
}

json small_suite() {
  return json::parse(R"({
    "master_seed": 3,
    "jobs": [
      {"id": "def", "inequality": "definition", "f": "power:s=1.5", "dims": [2, 3], "trials": 20},
      {"id": "jen", "inequality": "jensen", "h": "recip", "dims": 2, "trials": 10, "params": {"k": 4}},
      {"id": "cubic", "inequality": "definition", "f": "power:s=3", "mode": "falsify", "expect": "violation",
       "search": {"budget": 2000, "restarts": 10}},
      {"id": "chaos", "inequality": "chaotic_mean", "f": "power:s=3", "trials": 10}
    ]})");
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("exit codes per error kind") {
  CHECK(exit_code_for(ErrorKind::usage) == 2);
  CHECK(exit_code_for(ErrorKind::io) == 2);
  CHECK(exit_code_for(ErrorKind::numerical) == 3);
  CHECK(exit_code_for(ErrorKind::domain) == 3);
  CHECK(exit_code_for(ErrorKind::hypothesis) == 4);
}

TEST_CASE("format_double is the shortest round-trip form") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-12) == "-2.5e-12");
}

TEST_CASE("suite config errors name the offending field") {
  CHECK(suite_error(json::array()).find("expected a JSON object") != std::string::npos);
  CHECK(suite_error(json{{"jobs", json::array()}}).find("job list is empty") != std::string::npos);
  CHECK(suite_error(json{{"jobs", {{{"inequality", "nope"}}}}}).find("jobs[0].inequality") != std::string::npos);
  CHECK(suite_error(json{{"jobs", {{{"inequality", "definition"}, {"trials", 0}}}}}).find("jobs[0]") !=
        std::string::npos);
  CHECK(suite_error(json{{"jobs", {{{"inequality", "definition"}, {"colour", "red"}}}}}).find("colour") !=
        std::string::npos);
  CHECK(suite_error(json{{"jobs", {{{"inequality", "definition"}, {"f", "wobble"}}}}}).find("jobs[0]") !=
        std::string::npos);
  CHECK(suite_error(json{{"jobs", {{{"id", "a"}, {"inequality", "definition"}}, {{"id", "a"}, {"inequality", "jensen"}}}}})
            .find("duplicate") != std::string::npos);
  CHECK(suite_error(json{{"jobs", {{{"inequality", "definition"}, {"K", {0, "big"}}}}}}).find("K[1]") !=
        std::string::npos);
  CHECK(suite_error(json{{"bogus", 1}, {"jobs", {{{"inequality", "definition"}}}}}).find("bogus") !=
        std::string::npos);
  CHECK_THROWS_AS(SuiteConfig::load("/nonexistent/suite.json"), Error);
}

TEST_CASE("suite config parses every field form") {
  const SuiteConfig cfg = SuiteConfig::from_json(json::parse(R"({
    "master_seed": 9,
    "jobs": [
      {"id": "a", "inequality": "definition", "K": [0, "inf"], "tol": [1e-10, 1e-9], "dims": 4},
      {"id": "b", "inequality": "definition", "K": {"lo": 0.5, "hi": 2}, "tol": {"atol": 1e-8, "rtol": 1e-7},
       "seed": 123, "mode": "classify", "sweep": [0.5, 1.5], "search": {"budget": 1000, "restarts": 5}}
    ]})"));
  REQUIRE(cfg.jobs.size() == 2);
  CHECK(cfg.master_seed == 9);
  CHECK(std::isinf(cfg.jobs[0].interval().hi));
  CHECK(cfg.jobs[0].tol.atol == 1e-10);
  CHECK(cfg.jobs[0].dims == std::vector<int>{4});
  CHECK(cfg.jobs[0].seed == SeedSpec{9, 0}.derived());
  CHECK(cfg.jobs[1].seed == 123);
  CHECK(cfg.jobs[1].interval().lo == 0.5);
  CHECK(cfg.jobs[1].mode == JobMode::classify);
  CHECK(cfg.jobs[1].expectation() == Expectation::agree);
  CHECK(cfg.jobs[1].sweep_ratios == std::vector<double>{0.5, 1.5});
  CHECK(cfg.jobs[1].search.budget == 1000);
}

TEST_CASE("suite runs are byte-identical across reruns and thread counts") {
  const SuiteConfig cfg = SuiteConfig::from_json(small_suite());
  const SuiteReport a = run_suite(cfg, RunOptions{1, {}});
  const SuiteReport b = run_suite(cfg, RunOptions{1, {}});
  const SuiteReport c = run_suite(cfg, RunOptions{3, {}});
  CHECK(a.csv == b.csv);
  CHECK(a.csv == c.csv);
  CHECK(a.exit_code == 0);

  const auto rows = lines(a.csv);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "job_id,inequality,f,h,p,dims,trials,held,failed,skipped,min_gap,max_violation,agreement,"
                   "expectation_met");
  CHECK(rows[1].rfind("def,definition,power:s=1.5,identity,1,2;3,20,20,0,0,", 0) == 0);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].substr(rows[i].size() - 4) == ",yes");
}

TEST_CASE("JSONL records carry the documented fields") {
  const SuiteReport r = run_suite(SuiteConfig::from_json(small_suite()), RunOptions{1, {}});
  const auto ls = lines(r.jsonl());
  REQUIRE(ls.size() == r.records.size());
  for (const std::string& l : ls) {
    const json j = json::parse(l);
    for (const char* key : {"schema_version", "job", "inequality", "trial", "n", "master_seed", "trial_seed", "status",
                            "gap", "scale", "band", "holds", "certified", "hypothesis_status", "exploratory",
                            "wall_time"})
      CHECK(j.contains(key));
    CHECK(j["schema_version"] == kRecordSchemaVersion);
    CHECK(j["hypothesis_status"] == "ok");
  }
  // Records are grouped by job and ordered by trial.
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    if (r.records[i].job == r.records[i - 1].job) CHECK(r.records[i].trial > r.records[i - 1].trial);
  }
}

TEST_CASE("check exit codes") {
  JobSpec ok;
  ok.trials = 30;
  CHECK(run_check(ok, {}).exit_code == exit_code::ok);

  JobSpec cubic = ok;
  cubic.h = "cubic";
  const CheckReport c = run_check(cubic, {});
  CHECK(c.exit_code == exit_code::violation);
  CHECK(c.tally.failed > 0);

  JobSpec hyp;
  hyp.inequality = InequalityId::contraction;
  hyp.h = "power:s=0.5";
  hyp.trials = 3;
  const CheckReport h = run_check(hyp, {});
  CHECK(h.exit_code == exit_code::hypothesis);
  CHECK(h.tally.skipped == 3);
  CHECK(h.records.front().to_json()["hypothesis_status"].get<std::string>().rfind("violated: ", 0) == 0);
  CHECK(h.records.front().to_json()["gap"].is_null());

  JobSpec chaos;
  chaos.inequality = InequalityId::chaotic_mean;
  chaos.f = "power:s=3";
  chaos.trials = 100;
  const CheckReport x = run_check(chaos, {});
  CHECK(x.exit_code == exit_code::ok);
  CHECK(x.tally.exploratory_failures == x.tally.failed);
}

TEST_CASE("failed trials write replayable witnesses") {
  const auto dir = std::filesystem::temp_directory_path() / "opgx_report_witness";
  std::filesystem::remove_all(dir);
  JobSpec cubic;
  cubic.id = "cub";
  cubic.h = "cubic";
  cubic.trials = 5;
  const CheckReport c = run_check(cubic, RunOptions{1, dir.string()});
  int written = 0;
  for (const TrialRecord& r : c.records) {
    if (!r.witness_path) continue;
    ++written;
    const ReplayReport rep = replay_witness_file(*r.witness_path);
    REQUIRE(rep.recorded_gap);
    CHECK(rep.outcome.gap() == *rep.recorded_gap);
    CHECK(rep.outcome.gap() == r.gap);
  }
  CHECK(written == c.tally.failed);
  std::filesystem::remove_all(dir);
}

TEST_CASE("falsify and classify reports") {
  JobSpec job;
  job.mode = JobMode::falsify;
  job.f = "power:s=3";
  job.dims = {2, 3};
  job.search.budget = 4000;
  job.search.restarts = 10;
  const FalsifyReport f = run_falsify(job, {});
  CHECK(f.exit_code == exit_code::violation);
  REQUIRE(f.witness);
  CHECK(replay_witness(*f.witness).outcome.gap() == (*f.witness)["gap"].get<double>());

  job.f = "power:s=2";
  CHECK(run_falsify(job, {}).exit_code == exit_code::ok);

  job.mode = JobMode::classify;
  job.sweep_ratios = {0.5, 1.5, 3};
  const ClassifyReport c = run_classify(job, {});
  REQUIRE(c.rows.size() == 3);
  for (const ClassifyRow& row : c.rows) CHECK(row.agreement == std::optional<bool>(true));
  CHECK(c.exit_code == exit_code::ok);

  job.sweep_ratios = {};
  job.f = "power:s=3";
  job.dims = {1};
  CHECK(run_classify(job, {}).exit_code == exit_code::disagreement);
}

TEST_CASE("io errors") {
  CHECK_THROWS_AS(read_text_file("/nonexistent/file"), Error);
  CHECK_THROWS_AS(write_text_file("/proc/version/file", "x"), Error);
  try {
    read_text_file("/nonexistent/file");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
}
