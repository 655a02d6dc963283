#include "doctest.h"
#include "opspace/rng.hpp"
#include "opspace/serialization.hpp"
#include "support/oracles.hpp"

using namespace opspace;
using test::max_abs;

TEST_CASE("json round trips") {
  Rng rng(3);

  // matrices keep every entry bit for bit
  const CMatrix m = rng.gaussian_matrix(3, 2);
  const CMatrix back = cmatrix_from_json(to_json(m));
  CHECK(max_abs(back - m) == 0.0);
  const Json j = to_json(m);
  CHECK(j.at("rows") == 3);
  CHECK(j.at("cols") == 2);
  CHECK(j.at("re").size() == 6);

  // spaces round trip with kind and factors' bases
  const SpacePtr e = make_random_space(3, 2, 2, rng);
  const SpacePtr e_back = space_from_json(to_json(*e));
  CHECK(e_back->same_as(*e));
  const SpacePtr hc = make_column_hilbertian(2);
  CHECK(space_from_json(to_json(*hc))->kind() == SpaceKind::column);

  // elements with inline spaces
  std::vector<CMatrix> coeffs(3);
  for (auto& c : coeffs) c = rng.gaussian_matrix(2, 2);
  const AmplifiedElement u(e, 2, coeffs);
  const AmplifiedElement u_back = element_from_json(to_json(u));
  CHECK(u_back.level() == 2);
  for (int i = 0; i < 3; ++i)
    CHECK(max_abs(u_back.coeff(i) - u.coeff(i)) == 0.0);

  // elements with a registry reference
  Json ref = to_json(u);
  ref["space"] = "E";
  const AmplifiedElement via_ref =
      element_from_json(ref, SpaceRegistry{{"E", e}});
  CHECK(via_ref.space()->same_as(*e));
  CHECK_THROWS_AS(element_from_json(ref), std::invalid_argument);

  // bioperators
  std::vector<Complex> structure;
  for (int i = 0; i < 3 * 3; ++i) structure.push_back(rng.gaussian_complex());
  const Bioperator r(e, e, make_scalar_space(), structure);
  const Bioperator r_back = bioperator_from_json(to_json(r));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t jj = 0; jj < 3; ++jj)
      CHECK(std::abs(r_back.structure(i, jj, 0) - r.structure(i, jj, 0)) ==
            0.0);
}

TEST_CASE("report fields") {
  const SpacePtr c = make_scalar_space();
  const BioperatorEstimate est{1.5, 2, AmplifiedElement::zero(c, 2),
                               AmplifiedElement::zero(c, 2)};
  const Json j = to_json(est);
  CHECK(j.contains("level"));
  CHECK(j.contains("value"));
  CHECK(j.contains("witness_u"));
  CHECK(j.contains("witness_v"));

  EqualityReport report;
  report.case_tag = EqualityCase::col_haagerup_spatial;
  report.seed = 7;
  report.lower = 1.0;
  report.upper = 1.0 + 1e-9;
  report.gap_rel = 1e-9;
  report.resolved = true;
  const Json rj = to_json(report);
  CHECK(rj.at("case") == "col_haagerup_spatial");
  CHECK(rj.at("resolved") == true);
  CHECK(equality_case_from_string(rj.at("case").get<std::string>()) ==
        EqualityCase::col_haagerup_spatial);
}
