#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opspace/quantum_space.hpp"

namespace opspace {

enum class SuiteTag {
  growth,
  axioms,
  counterexamples,
  chain,
  equalities,
  factorization,
  all,
};

std::optional<SuiteTag> suite_from_string(const std::string& name);
std::string to_string(SuiteTag tag);

enum class ReportFormat { json, csv, text };
std::optional<ReportFormat> format_from_string(const std::string& name);

struct ExperimentConfig {
  SuiteTag suite = SuiteTag::all;
  std::uint64_t seed = 0;
  int max_n = 8;
  Budget budget;
  std::string output_path;  ///< empty: caller writes to stdout
  ReportFormat format = ReportFormat::json;
  bool parallel = false;
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::string first_failure;  ///< empty when passed
  nlohmann::json data;
};

/// Tabulates the cb-norm estimate of the identity from the column to the row
/// quantization of C^n at level n, for n = 1…max_n. With the partial-isometry
/// witness injected the estimate equals √n; no sampled candidate exceeds it.
SuiteResult run_growth(const ExperimentConfig& cfg);

/// Ruan axiom battery on sampled concrete quantizations: the bimodule
/// inequality, the orthogonal-support equality, the ℓ²-bound for orthogonal
/// sums, rank-one-projection independence of the underlying norm, isometric
/// invariance, and corner-embedding norm preservation.
SuiteResult run_axioms(const ExperimentConfig& cfg);

/// The inner-product bifunctional on mismatched Hilbertian pairs: strong
/// amplification value n on column×conjugate-row, weak amplification value √n
/// on matched pairs, and boundedness (value ≤ ‖f‖) on row×column.
SuiteResult run_counterexamples(const ExperimentConfig& cfg);

/// Spatial ≤ Haagerup-upper and Haagerup-lower ≤ projective-upper on random
/// instances.
SuiteResult run_chain(const ExperimentConfig& cfg);

/// All exact-equality cases over several seeds.
SuiteResult run_equalities(const ExperimentConfig& cfg);

/// Diamond factorization battery: relative reconstruction error of
/// a = b·(c◇c)·b′ over random matrices at base levels 2 and 3.
SuiteResult run_factorization(const ExperimentConfig& cfg);

struct RunReport {
  nlohmann::json json;
  bool all_passed = true;
  std::string first_failure;
};

/// Dispatches to the named suite(s), assembles the report (deterministic for
/// a fixed config, apart from the timestamp field), and renders it in the
/// requested format via render_report.
RunReport run_suite(const ExperimentConfig& cfg);

std::string render_report(const RunReport& report, ReportFormat format);

}  // namespace opspace
