#include <cmath>

#include "doctest.h"
#include "opspace/bioperators.hpp"
#include "opspace/rng.hpp"
#include "support/oracles.hpp"

using namespace opspace;
using test::max_abs;

namespace {

AmplifiedElement random_element(const SpacePtr& space, int level, Rng& rng) {
  std::vector<CMatrix> coeffs(space->dim());
  for (auto& c : coeffs) c = rng.gaussian_matrix(level, level);
  return AmplifiedElement(space, level, std::move(coeffs));
}

double element_distance(const AmplifiedElement& a, const AmplifiedElement& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i)
    d = std::max(d, max_abs(a.coeff(i) - b.coeff(i)));
  return d;
}

}  // namespace

TEST_CASE("strong amplification") {
  Rng rng(3);

  // scalar multiplication amplifies to the matrix product
  const Bioperator mult = make_scalar_multiplication();
  const SpacePtr c = mult.dom_e();
  const CMatrix a = rng.gaussian_matrix(3, 3), b = rng.gaussian_matrix(3, 3);
  const AmplifiedElement out = strong_amplify(
      mult, AmplifiedElement::elementary(c, 0, a),
      AmplifiedElement::elementary(c, 0, b));
  CHECK(max_abs(out.coeff(0) - CMatrix(a * b)) <= 1e-14);

  // the inner product sends the witness pair to n·P
  const int n = 3;
  const SpacePtr hc = make_column_hilbertian(n);
  const SpacePtr hr_bar = make_conjugate_row(n);
  const Bioperator pairing = make_inner_product(hc, hr_bar);
  const AmplifiedElement omega = make_omega(n, n, hc);
  const AmplifiedElement varpi = make_varpi(n, n, hr_bar);
  const AmplifiedElement image = strong_amplify(pairing, omega, varpi);
  const CMatrix p = make_partial_isometries(n, n).initial_projection;
  CHECK(max_abs(image.coeff(0) - static_cast<double>(n) * p) <= 1e-14);
  CHECK(std::abs(amplified_norm(image) - n) <= 1e-10);

  // bilinearity in the first slot
  const SpacePtr e = make_random_space(2, 2, 2, rng);
  const SpacePtr f = make_random_space(2, 2, 2, rng);
  CVector fe = rng.gaussian_vector(2), ff = rng.gaussian_vector(2);
  const Bioperator prod = make_functional_product(e, fe, f, ff);
  const AmplifiedElement u1 = random_element(e, 2, rng);
  const AmplifiedElement u2 = random_element(e, 2, rng);
  const AmplifiedElement v = random_element(f, 2, rng);
  CHECK(element_distance(strong_amplify(prod, u1 + u2, v),
                         strong_amplify(prod, u1, v) +
                             strong_amplify(prod, u2, v)) <= 1e-12);

  CHECK_THROWS_AS(strong_amplify(prod, random_element(e, 2, rng),
                                 random_element(f, 3, rng)),
                  std::invalid_argument);
}

TEST_CASE("weak amplification") {
  const int n = 3;
  const DiamondContext ctx(n);
  const SpacePtr hc = make_column_hilbertian(n);
  const SpacePtr hc_bar = make_conjugate_column(n);
  const SpacePtr hr = make_row_hilbertian(n);
  const SpacePtr hr_bar = make_conjugate_row(n);
  const double root = std::sqrt(static_cast<double>(n));

  {  // column pair: Σ q_k^* ◇ q_k^* of norm √n
    const Bioperator pairing = make_inner_product(hc, hc_bar);
    const AmplifiedElement omega_c = make_omega(n, n, hc);
    const AmplifiedElement omega_cbar = make_omega(n, n, hc_bar);
    const AmplifiedElement image =
        weak_amplify(pairing, omega_c, omega_cbar, ctx);
    const PartialIsometrySet set = make_partial_isometries(n, n);
    CMatrix expected = CMatrix::Zero(n * n, n * n);
    for (const CMatrix& q : set.q)
      expected += diamond(CMatrix(q.adjoint()), CMatrix(q.adjoint()), ctx);
    CHECK(max_abs(image.coeff(0) - expected) <= 1e-14);
    CHECK(std::abs(amplified_norm(image) - root) <= 1e-10);
  }
  {  // row pair at the adjoint witnesses: norm √n as well
    const Bioperator pairing = make_inner_product(hr, hr_bar);
    const AmplifiedElement varpi_r = make_varpi(n, n, hr);
    const AmplifiedElement varpi_rbar = make_varpi(n, n, hr_bar);
    const AmplifiedElement image =
        weak_amplify(pairing, varpi_r, varpi_rbar, ctx);
    CHECK(std::abs(amplified_norm(image) - root) <= 1e-10);
  }
  {  // product functionals stay multiplicatively bounded
    Rng rng(7);
    const SpacePtr e = make_random_space(2, 2, 2, rng);
    const SpacePtr f = make_random_space(2, 2, 2, rng);
    const CVector fe = rng.gaussian_vector(2), ff = rng.gaussian_vector(2);
    const Bioperator prod = make_functional_product(e, fe, f, ff);
    const double fn = functional_norm_upper(*e, fe);
    const double gn = functional_norm_upper(*f, ff);
    const DiamondContext ctx2(2);
    for (int k = 0; k < 25; ++k) {
      const AmplifiedElement u = random_element(e, 2, rng);
      const AmplifiedElement v = random_element(f, 2, rng);
      const double bound = fn * gn * amplified_norm(u) * amplified_norm(v);
      CHECK(amplified_norm(weak_amplify(prod, u, v, ctx2)) <=
            bound * (1 + 1e-10) + 1e-12);
    }
  }
}

TEST_CASE("diamond actions") {
  Rng rng(11);
  const SpacePtr e = make_random_space(2, 2, 2, rng);
  const int m = 3;
  const DiamondContext ctx(m);
  const AmplifiedElement u = random_element(e, m, rng);

  {  // projections of any rank act isometrically on either side
    CMatrix p1 = CMatrix::Zero(m, m);
    p1(0, 0) = 1.0;
    CMatrix p2 = CMatrix::Zero(m, m);
    p2(0, 0) = p2(1, 1) = 1.0;
    const double norm_u = amplified_norm(u);
    for (const CMatrix& p : {p1, p2}) {
      CHECK(std::abs(amplified_norm(diamond_act_left(p, u, ctx)) - norm_u) <=
            1e-12 * norm_u);
      CHECK(std::abs(amplified_norm(diamond_act_right(u, p, ctx)) - norm_u) <=
            1e-12 * norm_u);
    }
  }

  // mixed diamond/module identities
  std::vector<int> shuffled = rng.permutation(m * m);
  for (const DiamondContext& c : {ctx, DiamondContext(m, shuffled)}) {
    for (int k = 0; k < 8; ++k) {
      const CMatrix a = rng.gaussian_matrix(m, m);
      const CMatrix b = rng.gaussian_matrix(m, m);
      const CMatrix d = rng.gaussian_matrix(m, m);
      const CMatrix ab = diamond(a, b, c);
      const CMatrix id2 = CMatrix::Identity(m * m, m * m);

      // (a◇b)·(d◇u) = ad ◇ (b·u)
      CHECK(element_distance(
                module_action(ab, diamond_act_left(d, u, c), id2),
                diamond_act_left(CMatrix(a * d),
                                 module_action(b, u, CMatrix::Identity(m, m)),
                                 c)) <= 1e-12);
      // (a◇u)·(b◇d) = ab ◇ (u·d)
      CHECK(element_distance(
                module_action(id2, diamond_act_left(a, u, c),
                              diamond(b, d, c)),
                diamond_act_left(CMatrix(a * b),
                                 module_action(CMatrix::Identity(m, m), u, d),
                                 c)) <= 1e-12);
      // (a◇b)·(u◇d) = (a·u) ◇ bd
      CHECK(element_distance(
                module_action(ab, diamond_act_right(u, d, c), id2),
                diamond_act_right(
                    module_action(a, u, CMatrix::Identity(m, m)),
                    CMatrix(b * d), c)) <= 1e-12);
      // (u◇a)·(b◇d) = (u·b) ◇ ad
      CHECK(element_distance(
                module_action(id2, diamond_act_right(u, a, c),
                              diamond(b, d, c)),
                diamond_act_right(
                    module_action(CMatrix::Identity(m, m), u, b),
                    CMatrix(a * d), c)) <= 1e-12);
    }
  }
}

TEST_CASE("bioperator norm estimates") {
  Rng rng(13);
  const Budget budget{6, 40};

  {  // product functionals: never above ‖f‖·‖g‖
    const SpacePtr hc = make_column_hilbertian(3);
    const SpacePtr hr = make_row_hilbertian(3);
    const CVector f = rng.gaussian_vector(3), g = rng.gaussian_vector(3);
    const Bioperator prod = make_functional_product(hc, f, hr, g);
    const BioperatorEstimate scb = estimate_scb(prod, 2, budget, 5);
    CHECK(scb.value <= f.norm() * g.norm() + 1e-8);
  }

  const int n = 3;
  const double root = std::sqrt(static_cast<double>(n));
  {  // inner product on column × conjugate-row: witness value n
    const SpacePtr hc = make_column_hilbertian(n);
    const SpacePtr hr_bar = make_conjugate_row(n);
    const Bioperator pairing = make_inner_product(hc, hr_bar);
    const WitnessPair witness{make_omega(n, n, hc), make_varpi(n, n, hr_bar)};
    const WitnessPair injected[] = {witness};
    const BioperatorEstimate est =
        estimate_scb(pairing, n, budget, 9, injected);
    CHECK(est.value >= n - 1e-9);
  }
  {  // inner product on column × conjugate-column: weak witness value √n
    const SpacePtr hc = make_column_hilbertian(n);
    const SpacePtr hc_bar = make_conjugate_column(n);
    const Bioperator pairing = make_inner_product(hc, hc_bar);
    const WitnessPair witness{make_omega(n, n, hc), make_omega(n, n, hc_bar)};
    const WitnessPair injected[] = {witness};
    const BioperatorEstimate est =
        estimate_wcb(pairing, n, budget, 9, injected);
    CHECK(est.value >= root - 1e-9);
  }
}

TEST_CASE("opposite bioperator") {
  Rng rng(17);
  const SpacePtr e = make_random_space(2, 2, 2, rng);
  const SpacePtr f = make_random_space(2, 2, 2, rng);
  std::vector<Complex> structure;
  for (int i = 0; i < 4; ++i) structure.push_back(rng.gaussian_complex());
  const Bioperator r(e, f, make_scalar_space(), structure);

  //  (R^op)^op = R
  const Bioperator twice = opposite(opposite(r));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(std::abs(twice.structure(i, j, 0) - r.structure(i, j, 0)) == 0.0);

  const int m = 2;
  const DiamondContext ctx(m);
  const AmplifiedElement u = random_element(e, m, rng);
  const AmplifiedElement v = random_element(f, m, rng);

  // flip conjugation identity at the amplified level
  const AmplifiedElement lhs = weak_amplify(opposite(r), v, u, ctx);
  const AmplifiedElement rhs = module_action(
      ctx.delta(), weak_amplify(r, u, v, ctx), ctx.delta());
  CHECK(element_distance(lhs, rhs) <= 1e-12);

  // weak candidate values transfer through the flip
  const double value_op = amplified_norm(lhs) /
                          (amplified_norm(v) * amplified_norm(u));
  const double value = amplified_norm(weak_amplify(r, u, v, ctx)) /
                       (amplified_norm(u) * amplified_norm(v));
  CHECK(std::abs(value_op - value) <= 1e-10 * std::max(1.0, value));
}

TEST_CASE("bifunctional composition") {
  Rng rng(19);
  const int dh = 3, dk = 2, m = 3;
  const SpacePtr hr = make_row_hilbertian(dh);
  const SpacePtr kc = make_column_hilbertian(dk);

  CMatrix phi = rng.gaussian_matrix(dh, dk);
  std::vector<Complex> entries;
  for (int i = 0; i < dh; ++i)
    for (int j = 0; j < dk; ++j) entries.push_back(phi(i, j));
  const Bioperator f(hr, kc, make_scalar_space(), entries);

  // elementary tensors: the composition is f(y,x)·(b·a)
  const CMatrix a = rng.gaussian_matrix(m, m), b = rng.gaussian_matrix(m, m);
  const AmplifiedElement u = AmplifiedElement::elementary(kc, 1, a);
  const AmplifiedElement v = AmplifiedElement::elementary(hr, 2, b);
  const CMatrix composed = compose_bifunctional(f, v, u);
  CHECK(max_abs(composed - phi(2, 1) * CMatrix(b * a)) <= 1e-12);

  // agrees with the strong amplification and respects ‖f‖·‖v‖·‖u‖
  const double f_norm = op_norm(phi);
  for (int k = 0; k < 20; ++k) {
    const AmplifiedElement uu = random_element(kc, m, rng);
    const AmplifiedElement vv = random_element(hr, m, rng);
    const CMatrix through = compose_bifunctional(f, vv, uu);
    const AmplifiedElement direct = strong_amplify(f, vv, uu);
    CHECK(max_abs(through - direct.coeff(0)) <= 1e-12);
    CHECK(op_norm(through) <=
          f_norm * amplified_norm(vv) * amplified_norm(uu) * (1 + 1e-12));
  }

  // zero bifunctional gives the zero composition
  const Bioperator zero(hr, kc, make_scalar_space(),
                        std::vector<Complex>(dh * dk, Complex(0, 0)));
  CHECK(max_abs(compose_bifunctional(zero, v, u)) == 0.0);
}

TEST_CASE("compression identity") {
  Rng rng(23);
  const SpacePtr e = make_random_space(2, 2, 2, rng);
  const SpacePtr f = make_random_space(2, 2, 2, rng);
  std::vector<Complex> structure;
  for (int i = 0; i < 4; ++i) structure.push_back(rng.gaussian_complex());
  const Bioperator r(e, f, make_scalar_space(), structure);

  {  // full projection, level 2
    const int m = 2;
    const DiamondContext ctx(m);
    const CompressionIdentityReport rep = compression_identity_check(
        r, random_element(e, m, rng), random_element(f, m, rng),
        CMatrix::Identity(m, m), ctx);
    CHECK(rep.passed);
    CHECK(rep.weak_norm > 0);
  }
  {  // zero projection kills both sides
    const int m = 2;
    const DiamondContext ctx(m);
    const CompressionIdentityReport rep = compression_identity_check(
        r, random_element(e, m, rng), random_element(f, m, rng),
        CMatrix::Zero(m, m), ctx);
    CHECK(rep.passed);
    CHECK(rep.weak_norm == 0.0);
    CHECK(rep.strong_norm == 0.0);
  }
  {  // rank-one projection at level 3, shuffled pairing as well
    const int m = 3;
    CMatrix p = CMatrix::Zero(m, m);
    p(1, 1) = 1.0;
    std::vector<int> shuffled = rng.permutation(m * m);
    for (const DiamondContext& ctx :
         {DiamondContext(m), DiamondContext(m, shuffled)}) {
      const CompressionIdentityReport rep = compression_identity_check(
          r, random_element(e, m, rng), random_element(f, m, rng), p, ctx);
      CHECK(rep.passed);
    }
  }
}

TEST_CASE("compressed weak candidates stay under the strong estimate") {
  Rng rng(29);
  const SpacePtr e = make_random_space(2, 2, 2, rng);
  const SpacePtr f = make_random_space(2, 2, 2, rng);
  std::vector<Complex> structure;
  for (int i = 0; i < 4; ++i) structure.push_back(rng.gaussian_complex());
  const Bioperator r(e, f, make_scalar_space(), structure);

  const int m = 2;
  const DiamondContext ctx(m);
  const AmplifiedElement u = random_element(e, m, rng);
  const AmplifiedElement v = random_element(f, m, rng);
  CMatrix p = CMatrix::Zero(m, m);
  p(0, 0) = 1.0;

  const AmplifiedElement u_comp = diamond_act_right(u, p, ctx);
  const AmplifiedElement v_comp = diamond_act_left(p, v, ctx);
  const WitnessPair transported[] = {{u_comp, v_comp}};
  const BioperatorEstimate scb =
      estimate_scb(r, m * m, Budget{4, 30}, 3, transported);

  const double weak_value =
      amplified_norm(weak_amplify(
          r, module_action(CMatrix::Identity(m, m), u, p),
          module_action(p, v, CMatrix::Identity(m, m)), ctx)) /
      (amplified_norm(u_comp) * amplified_norm(v_comp));
  CHECK(weak_value <= scb.value + 1e-12);
}

TEST_CASE("underlying values stay under the level-one weak estimate") {
  Rng rng(31);
  const SpacePtr e = make_random_space(2, 2, 2, rng);
  const SpacePtr f = make_random_space(2, 2, 2, rng);
  std::vector<Complex> structure;
  for (int i = 0; i < 4; ++i) structure.push_back(rng.gaussian_complex());
  const Bioperator r(e, f, make_scalar_space(), structure);

  const BioperatorEstimate level_one = estimate_wcb(r, 1, Budget{4, 30}, 5);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      CVector xi = CVector::Zero(2), yj = CVector::Zero(2);
      xi(static_cast<Eigen::Index>(i)) = 1.0;
      yj(static_cast<Eigen::Index>(j)) = 1.0;
      const double value = std::abs(r.structure(i, j, 0));
      const double bound = underlying_norm(*e, xi) * underlying_norm(*f, yj);
      CHECK(value <= level_one.value * bound * (1 + 1e-10) + 1e-12);
    }
}

TEST_CASE("spatial multiplication is strongly contractive") {
  Rng rng(37);
  const SpacePtr e = make_random_space(2, 2, 2, rng);
  const SpacePtr f = make_random_space(2, 3, 2, rng);
  const Bioperator t = make_tensor_bioperator(e, f);
  const int m = 2;

  for (int k = 0; k < 25; ++k) {
    const AmplifiedElement u = random_element(e, m, rng);
    const AmplifiedElement v = random_element(f, m, rng);
    const AmplifiedElement image = strong_amplify(t, u, v);

    // the image equals the composition of the two inflated operators
    const CMatrix big_u =
        kron(u.assembled(), CMatrix::Identity(f->out_dim(), f->out_dim()));
    CMatrix big_v = CMatrix::Zero(
        m * e->in_dim() * f->out_dim(), m * e->in_dim() * f->in_dim());
    for (std::size_t j = 0; j < f->dim(); ++j)
      big_v += kron(v.coeff(j),
                    kron(CMatrix::Identity(e->in_dim(), e->in_dim()),
                         f->basis(j)));
    const CMatrix composed = big_u * big_v;
    CHECK(max_abs(image.assembled() - composed) <= 1e-12 *
          std::max(1.0, max_abs(composed)));

    const double bound = amplified_norm(u) * amplified_norm(v);
    CHECK(amplified_norm(image) <= bound * (1 + 1e-10) + 1e-12);
  }
}
