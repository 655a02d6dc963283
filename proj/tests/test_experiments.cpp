#include <string>

#include "doctest.h"
#include "opspace/experiments.hpp"

using namespace opspace;

namespace {

ExperimentConfig small_config(SuiteTag suite) {
  ExperimentConfig cfg;
  cfg.suite = suite;
  cfg.seed = 42;
  cfg.max_n = 3;
  cfg.budget = Budget{4, 30};
  return cfg;
}

}  // namespace

TEST_CASE("suite and format names") {
  CHECK(suite_from_string("growth") == SuiteTag::growth);
  CHECK(suite_from_string("all") == SuiteTag::all);
  CHECK_FALSE(suite_from_string("bogus").has_value());
  CHECK(format_from_string("csv") == ReportFormat::csv);
  CHECK_FALSE(format_from_string("xml").has_value());
}

TEST_CASE("growth suite reaches the exact square roots") {
  const SuiteResult result = run_growth(small_config(SuiteTag::growth));
  CHECK(result.passed);
  const auto& rows = result.data.at("rows");
  CHECK(rows.size() == 3);
  CHECK(rows[0].at("estimate").get<double>() == doctest::Approx(1.0));
  CHECK(rows[1].at("estimate").get<double>() ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("full run through the dispatcher") {
  const RunReport report = run_suite(small_config(SuiteTag::all));
  CHECK(report.all_passed);
  CHECK(report.json.at("suites").size() == 6);
  CHECK(report.json.at("summary").at("sections").get<int>() == 7);

  // determinism apart from the timestamp
  const RunReport again = run_suite(small_config(SuiteTag::all));
  nlohmann::json a = report.json, b = again.json;
  a.erase("timestamp");
  b.erase("timestamp");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("csv rendering contract") {
  const RunReport report = run_suite(small_config(SuiteTag::growth));
  const std::string csv = render_report(report, ReportFormat::csv);
  CHECK(csv.find("# suite: growth\n") != std::string::npos);
  CHECK(csv.find("n,estimate,expected\n") != std::string::npos);

  const std::string text = render_report(report, ReportFormat::text);
  CHECK(text.find("[PASS] growth") != std::string::npos);
  CHECK(text.find("ALL PASSED") != std::string::npos);

  const std::string json_out = render_report(report, ReportFormat::json);
  CHECK(nlohmann::json::parse(json_out).contains("summary"));
}

TEST_CASE("parallel fan-out matches the sequential report") {
  ExperimentConfig cfg = small_config(SuiteTag::all);
  const RunReport sequential = run_suite(cfg);
  cfg.parallel = true;
  const RunReport parallel = run_suite(cfg);
  nlohmann::json a = sequential.json, b = parallel.json;
  a.erase("timestamp");
  b.erase("timestamp");
  a["config"].erase("parallel");
  b["config"].erase("parallel");
  CHECK(a.dump() == b.dump());
}
