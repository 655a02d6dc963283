// Command line runner for the experiment suites.
//
// Usage:
//   opspace run --suite all --seed 42 --max-n 8 --restarts 32 --iters 200 \
//               --format json --out report.json
//
// The OPSPACE_SEED environment variable overrides --seed. Exit status is 0
// exactly when every assertion in every executed suite passed.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "opspace/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"operator space experiment runner"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "execute experiment suites");
  std::string suite_name = "all";
  std::string format_name = "json";
  std::string out_path;
  std::uint64_t seed = 0;
  int max_n = 8;
  int restarts = 32;
  int iters = 200;
  bool parallel = false;

  run->add_option("--suite", suite_name,
                  "growth|axioms|counterexamples|chain|equalities|"
                  "factorization|all")
      ->check(CLI::IsMember({"growth", "axioms", "counterexamples", "chain",
                             "equalities", "factorization", "all"}));
  run->add_option("--seed", seed, "master seed (64-bit)");
  run->add_option("--max-n", max_n, "largest witness count")
      ->check(CLI::PositiveNumber);
  run->add_option("--restarts", restarts, "search restarts")
      ->check(CLI::PositiveNumber);
  run->add_option("--iters", iters, "search iterations per restart")
      ->check(CLI::PositiveNumber);
  run->add_option("--format", format_name, "json|csv|text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  run->add_option("--out", out_path, "report file (default: stdout)");
  run->add_flag("--parallel", parallel, "fan suites out to worker threads");

  CLI11_PARSE(app, argc, argv);

  opspace::ExperimentConfig cfg;
  cfg.suite = *opspace::suite_from_string(suite_name);
  cfg.format = *opspace::format_from_string(format_name);
  cfg.seed = seed;
  cfg.max_n = max_n;
  cfg.budget = opspace::Budget{restarts, iters};
  cfg.output_path = out_path;
  cfg.parallel = parallel;

  if (const char* env_seed = std::getenv("OPSPACE_SEED")) {
    try {
      cfg.seed = std::stoull(env_seed);
    } catch (const std::exception&) {
      std::cerr << "opspace: invalid OPSPACE_SEED value '" << env_seed
                << "'\n";
      return 2;
    }
  }

  opspace::RunReport report;
  try {
    report = opspace::run_suite(cfg);
  } catch (const std::exception& err) {
    std::cerr << "opspace: " << err.what() << "\n";
    return 2;
  }

  const std::string rendered = opspace::render_report(report, cfg.format);
  if (cfg.output_path.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out(cfg.output_path);
    if (!out) {
      std::cerr << "opspace: cannot write to " << cfg.output_path << "\n";
      return 2;
    }
    out << rendered;
  }

  if (!report.all_passed) {
    std::cerr << "opspace: first failing case: " << report.first_failure
              << "\n";
    return 1;
  }
  return 0;
}
