#include "opspace/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <future>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "opspace/bioperators.hpp"
#include "opspace/rng.hpp"
#include "opspace/serialization.hpp"
#include "opspace/tensor_products.hpp"

namespace opspace {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void note_failure(SuiteResult& result, const std::string& what) {
  if (result.passed) {
    result.passed = false;
    result.first_failure = what;
  }
}

CMatrix random_unitary(int n, Rng& rng) {
  const CMatrix g = rng.gaussian_matrix(n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  return qr.householderQ() * CMatrix::Identity(n, n);
}

AmplifiedElement random_element(const SpacePtr& space, int level, Rng& rng) {
  std::vector<CMatrix> coeffs(space->dim());
  for (auto& c : coeffs) c = rng.gaussian_matrix(level, level);
  return AmplifiedElement(space, level, std::move(coeffs));
}

}  // namespace

std::optional<SuiteTag> suite_from_string(const std::string& name) {
  if (name == "growth") return SuiteTag::growth;
  if (name == "axioms") return SuiteTag::axioms;
  if (name == "counterexamples") return SuiteTag::counterexamples;
  if (name == "chain") return SuiteTag::chain;
  if (name == "equalities") return SuiteTag::equalities;
  if (name == "factorization") return SuiteTag::factorization;
  if (name == "all") return SuiteTag::all;
  return std::nullopt;
}

std::string to_string(SuiteTag tag) {
  switch (tag) {
    case SuiteTag::growth: return "growth";
    case SuiteTag::axioms: return "axioms";
    case SuiteTag::counterexamples: return "counterexamples";
    case SuiteTag::chain: return "chain";
    case SuiteTag::equalities: return "equalities";
    case SuiteTag::factorization: return "factorization";
    case SuiteTag::all: return "all";
  }
  return "all";
}

std::optional<ReportFormat> format_from_string(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "text") return ReportFormat::text;
  return std::nullopt;
}

SuiteResult run_growth(const ExperimentConfig& cfg) {
  SuiteResult result;
  result.name = "growth";
  json rows = json::array();
  for (int n = 1; n <= cfg.max_n; ++n) {
    const SpacePtr hc = make_column_hilbertian(n);
    const SpacePtr hr = make_row_hilbertian(n);
    const LinearMap identity = LinearMap::identity(hc, hr);
    const AmplifiedElement omega = make_omega(n, n, hc);
    const AmplifiedElement witnesses[] = {omega};
    const CbEstimate est = cb_norm_estimate(
        identity, n, cfg.budget, mix_seed(cfg.seed, 0x67 + n), witnesses);
    const double expected = std::sqrt(static_cast<double>(n));
    const bool pass = std::abs(est.value - expected) <= 1e-9 &&
                      est.value <= expected + 1e-6;
    if (!pass)
      note_failure(result, "growth: estimate at n=" + std::to_string(n));
    rows.push_back({{"n", n},
                    {"estimate", est.value},
                    {"expected", expected},
                    {"pass", pass},
                    {"witness", to_json(est.witness)}});
  }
  result.data["rows"] = std::move(rows);
  return result;
}

SuiteResult run_axioms(const ExperimentConfig& cfg) {
  SuiteResult result;
  result.name = "axioms";
  json rows = json::array();
  Rng rng(mix_seed(cfg.seed, 0x6178));

  std::vector<SpacePtr> spaces = {make_column_hilbertian(3),
                                  make_row_hilbertian(3),
                                  make_full_matrix_space(2, 2),
                                  make_random_space(3, 2, 2, rng)};
  auto pick_space = [&](int k) { return spaces[k % spaces.size()]; };
  const int instances = 50;

  auto add_check = [&](const std::string& name, int count, double violation,
                       double tolerance) {
    const bool pass = violation <= tolerance;
    if (!pass) note_failure(result, "axioms: " + name);
    rows.push_back({{"check", name},
                    {"instances", count},
                    {"max_violation", violation},
                    {"tolerance", tolerance},
                    {"pass", pass}});
  };

  {  // bimodule inequality ‖a·u·b‖ ≤ ‖a‖‖u‖‖b‖
    double violation = 0;
    for (int k = 0; k < instances; ++k) {
      const SpacePtr space = pick_space(k);
      const int m = 2 + k % 2;
      const AmplifiedElement u = random_element(space, m, rng);
      const CMatrix a = rng.gaussian_matrix(m, m);
      const CMatrix b = rng.gaussian_matrix(m, m);
      const double lhs = amplified_norm(module_action(a, u, b));
      const double rhs = op_norm(a) * amplified_norm(u) * op_norm(b);
      violation = std::max(violation, (lhs - rhs) / std::max(rhs, 1.0));
    }
    add_check("bimodule_inequality", instances, violation, 1e-12);
  }

  {  // orthogonal supports: ‖u+v‖ = max(‖u‖,‖v‖)
    double violation = 0;
    for (int k = 0; k < instances; ++k) {
      const SpacePtr space = pick_space(k);
      const int m = 4;
      CMatrix p = CMatrix::Zero(m, m), q = CMatrix::Zero(m, m);
      p.topLeftCorner(2, 2) = CMatrix::Identity(2, 2);
      q.bottomRightCorner(2, 2) = CMatrix::Identity(2, 2);
      const AmplifiedElement u =
          module_action(p, random_element(space, m, rng), p);
      const AmplifiedElement v =
          module_action(q, random_element(space, m, rng), q);
      const OrthogonalSupportReport rep = check_ruan_rii(u, v, p, q);
      violation = std::max(
          violation,
          rep.deviation / std::max(std::max(rep.norm_u, rep.norm_v), 1.0));
    }
    add_check("orthogonal_support_equality", instances, violation, 1e-10);
  }

  {  // orthogonal left supports: ‖Σu_k‖ ≤ (Σ‖u_k‖²)^{1/2}
    double violation = 0;
    for (int k = 0; k < instances; ++k) {
      const SpacePtr space = pick_space(k);
      const int parts = 2 + k % 4;  // up to 5 summands
      const int m = parts;
      AmplifiedElement sum = AmplifiedElement::zero(space, m);
      double sq = 0;
      for (int t = 0; t < parts; ++t) {
        CMatrix pt = CMatrix::Zero(m, m);
        pt(t, t) = 1.0;
        const AmplifiedElement part =
            module_action(pt, random_element(space, m, rng),
                          CMatrix::Identity(m, m));
        sum = sum + part;
        const double norm = amplified_norm(part);
        sq += norm * norm;
      }
      const double bound = std::sqrt(sq);
      violation = std::max(
          violation, (amplified_norm(sum) - bound) / std::max(bound, 1.0));
    }
    add_check("orthogonal_sum_bound", instances, violation, 1e-12);
  }

  {  // underlying norm does not depend on the rank-one projection
    double violation = 0;
    for (int k = 0; k < instances; ++k) {
      const SpacePtr space = pick_space(k);
      const CVector x = rng.gaussian_vector(static_cast<int>(space->dim()));
      const double base = underlying_norm(*space, x);
      for (int t = 0; t < 10; ++t) {
        CVector e = rng.gaussian_vector(3);
        e.normalize();
        const CMatrix p = rank_one(e, e);
        std::vector<CMatrix> coeffs(space->dim());
        for (std::size_t i = 0; i < space->dim(); ++i)
          coeffs[i] = x(static_cast<Eigen::Index>(i)) * p;
        const double with_p =
            amplified_norm(AmplifiedElement(space, 3, std::move(coeffs)));
        violation =
            std::max(violation, std::abs(with_p - base) / std::max(base, 1.0));
      }
    }
    add_check("underlying_norm_projection_independence", instances, violation,
              1e-12);
  }

  {  // isometries preserve the norm
    double violation = 0;
    for (int k = 0; k < instances; ++k) {
      const SpacePtr space = pick_space(k);
      const int m = 3;
      const AmplifiedElement u = random_element(space, m, rng);
      const CMatrix w = random_unitary(m, rng);
      const double norm_u = amplified_norm(u);
      const double moved =
          amplified_norm(module_action(w, u, CMatrix::Identity(m, m)));
      violation =
          std::max(violation, std::abs(moved - norm_u) / std::max(norm_u, 1.0));
    }
    add_check("isometric_invariance", instances, violation, 1e-12);
  }

  {  // corner embedding preserves the norm
    double violation = 0;
    for (int k = 0; k < instances; ++k) {
      const SpacePtr space = pick_space(k);
      const AmplifiedElement u = random_element(space, 2, rng);
      const double norm_u = amplified_norm(u);
      const double embedded = amplified_norm(corner_embed(u, 5));
      violation = std::max(violation,
                           std::abs(embedded - norm_u) / std::max(norm_u, 1.0));
    }
    add_check("corner_embedding_isometry", instances, violation, 1e-12);
  }

  result.data["rows"] = std::move(rows);
  return result;
}

SuiteResult run_counterexamples(const ExperimentConfig& cfg) {
  SuiteResult result;
  result.name = "counterexamples";
  json rows = json::array();

  for (int n = 1; n <= cfg.max_n; ++n) {
    const SpacePtr hc = make_column_hilbertian(n);
    const SpacePtr hr = make_row_hilbertian(n);
    const SpacePtr hc_bar = make_conjugate_column(n);
    const SpacePtr hr_bar = make_conjugate_row(n);
    const DiamondContext ctx(n);

    // Strong amplification of the inner product on column × conjugate-row at
    // the isometry witnesses: value n.
    const Bioperator pairing_cr = make_inner_product(hc, hr_bar);
    const AmplifiedElement omega_c = make_omega(n, n, hc);
    const AmplifiedElement varpi_r = make_varpi(n, n, hr_bar);
    const double scb_value =
        amplified_norm(strong_amplify(pairing_cr, omega_c, varpi_r)) /
        (amplified_norm(omega_c) * amplified_norm(varpi_r));

    // Weak amplification on matched pairs: value √n.
    const Bioperator pairing_cc = make_inner_product(hc, hc_bar);
    const AmplifiedElement omega_cbar = make_omega(n, n, hc_bar);
    const double wcb_cc =
        amplified_norm(weak_amplify(pairing_cc, omega_c, omega_cbar, ctx)) /
        (amplified_norm(omega_c) * amplified_norm(omega_cbar));

    const Bioperator pairing_rr = make_inner_product(hr, hr_bar);
    const AmplifiedElement varpi_row = make_varpi(n, n, hr);
    const double wcb_rr =
        amplified_norm(weak_amplify(pairing_rr, varpi_row, varpi_r, ctx)) /
        (amplified_norm(varpi_row) * amplified_norm(varpi_r));

    // Row × column bifunctionals stay bounded by ‖f‖ under weak
    // amplification.
    Rng rng(mix_seed(cfg.seed, 0x6345 + static_cast<std::uint64_t>(n)));
    const int dim = std::min(n, 3);
    const SpacePtr dom_row = make_row_hilbertian(dim);
    const SpacePtr dom_col = make_column_hilbertian(dim);
    CMatrix structure = rng.gaussian_matrix(dim, dim);
    std::vector<Complex> entries;
    entries.reserve(static_cast<std::size_t>(dim) * dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) entries.push_back(structure(i, j));
    const Bioperator f(dom_row, dom_col, make_scalar_space(),
                       std::move(entries));
    const double f_norm = op_norm(structure);
    const Budget sample_budget{std::max(4, cfg.budget.restarts / 4),
                               std::max(20, cfg.budget.iterations / 4)};
    const BioperatorEstimate bounded = estimate_wcb(
        f, 2, sample_budget, mix_seed(cfg.seed, 0x6346 + n));

    const double expected_scb = static_cast<double>(n);
    const double expected_wcb = std::sqrt(static_cast<double>(n));
    const bool pass = std::abs(scb_value - expected_scb) <= 1e-10 &&
                      std::abs(wcb_cc - expected_wcb) <= 1e-10 &&
                      std::abs(wcb_rr - expected_wcb) <= 1e-10 &&
                      bounded.value <= f_norm + 1e-8;
    if (!pass)
      note_failure(result,
                   "counterexamples: values at n=" + std::to_string(n));
    rows.push_back(
        {{"n", n},
         {"scb_value", scb_value},
         {"scb_expected", expected_scb},
         {"wcb_cc_value", wcb_cc},
         {"wcb_rr_value", wcb_rr},
         {"wcb_expected", expected_wcb},
         {"bounded_value", bounded.value},
         {"bounded_limit", f_norm},
         {"pass", pass},
         // extremal values are reached on the canonical isometry witnesses,
         // fully determined by (count, level); the sampled boundedness check
         // carries its witness pair in full
         {"witnesses",
          {{"scb", "omega x varpi, count " + std::to_string(n) + ", level " +
                       std::to_string(n)},
           {"wcb", "omega x omega / varpi x varpi, count " +
                       std::to_string(n) + ", level " + std::to_string(n)},
           {"bounded", to_json(bounded)}}}});
  }
  result.data["rows"] = std::move(rows);
  return result;
}

SuiteResult run_chain(const ExperimentConfig& cfg) {
  SuiteResult result;
  result.name = "chain";
  json rows = json::array();
  Rng rng(mix_seed(cfg.seed, 0x6368));
  const Budget budget{8, 40};
  const int instances = 30;

  for (int k = 0; k < instances; ++k) {
    SpacePtr e, f;
    switch (k % 3) {
      case 0:
        e = make_random_space(2, 2, 2, rng);
        f = make_random_space(2, 2, 2, rng);
        break;
      case 1:
        e = make_column_hilbertian(2 + k % 2);
        f = make_random_space(3, 2, 2, rng);
        break;
      default:
        e = make_random_space(2, 3, 2, rng);
        f = make_row_hilbertian(2);
        break;
    }
    const EffrosTerm term{random_element(e, 2, rng), random_element(f, 2, rng)};
    const TensorRepresentation rep = TensorRepresentation::single(term);
    const NormBracket hb = haagerup_bracket(rep, budget, mix_seed(cfg.seed, k));
    const NormBracket pb =
        projective_bracket(rep, budget, mix_seed(cfg.seed, k + 1000));
    const double sp = spatial_norm(represented_element(rep));
    const bool pass = sp <= hb.upper + 1e-9 && hb.lower <= pb.upper + 1e-9 &&
                      hb.lower <= hb.upper && pb.lower <= pb.upper;
    if (!pass)
      note_failure(result, "chain: instance " + std::to_string(k));
    rows.push_back({{"instance", k},
                    {"spatial", sp},
                    {"h_lower", hb.lower},
                    {"h_upper", hb.upper},
                    {"proj_upper", pb.upper},
                    {"pass", pass}});
  }
  result.data["rows"] = std::move(rows);
  return result;
}

SuiteResult run_equalities(const ExperimentConfig& cfg) {
  SuiteResult result;
  result.name = "equalities";
  json rows = json::array();
  Rng rng(mix_seed(cfg.seed, 0x6571));
  const int seeds_per_case = 5;

  int counter = 0;
  for (const EqualityCase c : all_equality_cases()) {
    for (int k = 0; k < seeds_per_case; ++k, ++counter) {
      EqualityDims dims;
      dims.hilbert_dim = 2 + k % 2;
      dims.level = 2;
      dims.e = (k % 2 == 0) ? make_full_matrix_space(2, 2)
                            : make_random_space(3, 2, 2, rng);
      const EqualityReport report =
          equality_suite(c, dims, mix_seed(cfg.seed, 7000 + counter));
      if (!report.resolved)
        note_failure(result, "equalities: " + to_string(c) + " seed " +
                                 std::to_string(k));
      rows.push_back(to_json(report));
    }
  }
  result.data["rows"] = std::move(rows);
  return result;
}

SuiteResult run_factorization(const ExperimentConfig& cfg) {
  SuiteResult result;
  result.name = "factorization";
  json rows = json::array();
  const int seeds = 50;

  for (int m = 2; m <= 3; ++m) {
    const DiamondContext ctx(m);
    for (int k = 0; k < seeds; ++k) {
      Rng rng(mix_seed(cfg.seed, 0x6661 + static_cast<std::uint64_t>(m * 1000 + k)));
      const CMatrix a = rng.gaussian_matrix(m * m, m * m);
      const DiamondFactorization fac = factor_through_diamond(a, ctx);
      const CMatrix rebuilt =
          fac.b * diamond(fac.c, fac.c, ctx) * fac.b_prime;
      const double rel_error = (a - rebuilt).norm() / a.norm();
      const bool pass = rel_error <= 1e-8;
      if (!pass)
        note_failure(result, "factorization: m=" + std::to_string(m) +
                                 " seed " + std::to_string(k));
      rows.push_back({{"base_level", m},
                      {"seed", k},
                      {"rel_error", rel_error},
                      {"pass", pass}});
    }
  }
  result.data["rows"] = std::move(rows);
  return result;
}

namespace {

std::string iso_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::vector<SuiteTag> expand(SuiteTag tag) {
  if (tag != SuiteTag::all) return {tag};
  return {SuiteTag::growth,   SuiteTag::axioms, SuiteTag::counterexamples,
          SuiteTag::chain,    SuiteTag::equalities,
          SuiteTag::factorization};
}

SuiteResult dispatch(SuiteTag tag, const ExperimentConfig& cfg) {
  switch (tag) {
    case SuiteTag::growth: return run_growth(cfg);
    case SuiteTag::axioms: return run_axioms(cfg);
    case SuiteTag::counterexamples: return run_counterexamples(cfg);
    case SuiteTag::chain: return run_chain(cfg);
    case SuiteTag::equalities: return run_equalities(cfg);
    case SuiteTag::factorization: return run_factorization(cfg);
    case SuiteTag::all: break;
  }
  throw std::invalid_argument("dispatch: not a runnable suite");
}

}  // namespace

RunReport run_suite(const ExperimentConfig& cfg) {
  const std::vector<SuiteTag> tags = expand(cfg.suite);

  std::vector<SuiteResult> results;
  results.reserve(tags.size());
  if (cfg.parallel && tags.size() > 1) {
    std::vector<std::future<SuiteResult>> futures;
    futures.reserve(tags.size());
    for (SuiteTag tag : tags)
      futures.push_back(std::async(std::launch::async, dispatch, tag, cfg));
    for (auto& f : futures) results.push_back(f.get());
  } else {
    for (SuiteTag tag : tags) results.push_back(dispatch(tag, cfg));
  }

  RunReport report;
  json suites = json::object();
  for (const SuiteResult& r : results) {
    suites[r.name] = {{"passed", r.passed},
                      {"first_failure", r.first_failure},
                      {"data", r.data}};
    if (!r.passed && report.all_passed) {
      report.all_passed = false;
      report.first_failure = r.name + ": " + r.first_failure;
    }
  }

  report.json["config"] = {{"suite", to_string(cfg.suite)},
                           {"seed", cfg.seed},
                           {"max_n", cfg.max_n},
                           {"restarts", cfg.budget.restarts},
                           {"iterations", cfg.budget.iterations},
                           {"parallel", cfg.parallel}};
  report.json["timestamp"] = iso_timestamp();
  report.json["suites"] = std::move(suites);
  report.json["summary"] = {
      {"all_passed", report.all_passed},
      {"first_failure", report.first_failure},
      {"sections", results.size() + 1}};
  return report;
}

namespace {

const std::vector<std::string>& csv_columns(const std::string& suite) {
  static const std::map<std::string, std::vector<std::string>> columns = {
      {"growth", {"n", "estimate", "expected"}},
      {"axioms", {"check", "instances", "max_violation", "tolerance", "pass"}},
      {"counterexamples",
       {"n", "scb_value", "scb_expected", "wcb_cc_value", "wcb_rr_value",
        "wcb_expected", "bounded_value", "bounded_limit", "pass"}},
      {"chain",
       {"instance", "spatial", "h_lower", "h_upper", "proj_upper", "pass"}},
      {"equalities", {"case", "seed", "lower", "upper", "gap_rel", "resolved"}},
      {"factorization", {"base_level", "seed", "rel_error", "pass"}},
  };
  static const std::vector<std::string> empty;
  const auto it = columns.find(suite);
  return it == columns.end() ? empty : it->second;
}

std::string cell(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "1" : "0";
  if (value.is_number_float()) return fmt(value.get<double>());
  return value.dump();
}

}  // namespace

std::string render_report(const RunReport& report, ReportFormat format) {
  if (format == ReportFormat::json) return report.json.dump(2) + "\n";

  std::ostringstream out;
  const json& suites = report.json.at("suites");
  if (format == ReportFormat::csv) {
    bool first = true;
    for (const auto& [name, suite] : suites.items()) {
      if (!first) out << "\n";
      first = false;
      out << "# suite: " << name << "\n";
      const auto& cols = csv_columns(name);
      for (std::size_t i = 0; i < cols.size(); ++i)
        out << cols[i] << (i + 1 < cols.size() ? "," : "\n");
      for (const json& row : suite.at("data").at("rows")) {
        for (std::size_t i = 0; i < cols.size(); ++i)
          out << cell(row.at(cols[i])) << (i + 1 < cols.size() ? "," : "\n");
      }
    }
    return out.str();
  }

  // text
  for (const auto& [name, suite] : suites.items()) {
    out << (suite.at("passed").get<bool>() ? "[PASS] " : "[FAIL] ") << name;
    const auto& rows = suite.at("data").at("rows");
    out << " (" << rows.size() << " rows)\n";
    if (!suite.at("passed").get<bool>())
      out << "  first failure: " << suite.at("first_failure").get<std::string>()
          << "\n";
  }
  out << (report.all_passed ? "ALL PASSED" : "FAILED: " + report.first_failure)
      << "\n";
  return out.str();
}

}  // namespace opspace
