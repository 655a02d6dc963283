#include <cmath>

#include "doctest.h"
#include "opspace/matrix_core.hpp"
#include "opspace/rng.hpp"
#include "support/oracles.hpp"

using namespace opspace;
using test::max_abs;
using test::power_iteration_norm;

TEST_CASE("operator norm") {
  CHECK(op_norm(CMatrix::Identity(2, 2)) == doctest::Approx(1.0).epsilon(1e-14));

  Rng rng(11);
  CVector xi = rng.gaussian_vector(5);
  CVector eta = rng.gaussian_vector(5);
  xi *= 2.0 / xi.norm();
  eta *= 3.0 / eta.norm();
  CHECK(std::abs(op_norm(rank_one(xi, eta)) - 6.0) <= 1e-12);

  for (int seed = 0; seed < 5; ++seed) {
    Rng local(100 + seed);
    const CMatrix m = local.gaussian_matrix(4, 3);
    const double reference = power_iteration_norm(m);
    CHECK(std::abs(op_norm(m) - reference) <= 1e-10 * reference);
  }

  CHECK(op_norm(CMatrix::Zero(3, 3)) == 0.0);
  CHECK_THROWS_AS(op_norm(CMatrix()), std::invalid_argument);
}

TEST_CASE("rank one operators") {
  Rng rng(7);
  const CVector xi = rng.gaussian_vector(4), eta = rng.gaussian_vector(4);
  const CVector xi2 = rng.gaussian_vector(4), eta2 = rng.gaussian_vector(4);

  // (ξ∘η)(ξ′∘η′) = <ξ′,η>(ξ∘η′)
  const CMatrix lhs = rank_one(xi, eta) * rank_one(xi2, eta2);
  const Complex pairing = (eta.adjoint() * xi2)(0, 0);
  CHECK(max_abs(lhs - pairing * rank_one(xi, eta2)) <= 1e-12);

  // a·(ξ∘η) = a(ξ)∘η
  const CMatrix a = rng.gaussian_matrix(4, 4);
  CHECK(max_abs(a * rank_one(xi, eta) - rank_one(a * xi, eta)) <= 1e-12);

  // e∘e is the rank-one orthogonal projection onto its span
  CVector e = rng.gaussian_vector(4);
  e.normalize();
  const CMatrix p = rank_one(e, e);
  CHECK(max_abs(p * p - p) <= 1e-14);
  CHECK(max_abs(CMatrix(p.adjoint()) - p) <= 1e-14);
  CHECK(std::abs(p.trace().real() - 1.0) <= 1e-14);

  CHECK_THROWS_AS(rank_one(rng.gaussian_vector(3), rng.gaussian_vector(4)),
                  std::invalid_argument);
}

TEST_CASE("kronecker product") {
  CHECK(max_abs(kron(CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)) -
                CMatrix::Identity(6, 6)) == 0.0);

  Rng rng(13);
  for (int k = 0; k < 10; ++k) {
    const CMatrix a = rng.gaussian_matrix(3, 3), b = rng.gaussian_matrix(3, 3);
    const double prod = op_norm(a) * op_norm(b);
    CHECK(std::abs(op_norm(kron(a, b)) - prod) <= 1e-10 * prod);
  }

  // mixed product rule against dense multiplication
  const CMatrix a = rng.gaussian_matrix(2, 3), c = rng.gaussian_matrix(3, 2);
  const CMatrix b = rng.gaussian_matrix(4, 2), d = rng.gaussian_matrix(2, 4);
  CHECK(max_abs(kron(a, b) * kron(c, d) - kron(CMatrix(a * c), CMatrix(b * d))) <=
        1e-12);
}

TEST_CASE("diamond context invariants") {
  Rng rng(17);
  for (int m : {2, 3}) {
    std::vector<int> shuffled = rng.permutation(m * m);
    for (const DiamondContext& ctx :
         {DiamondContext(m), DiamondContext(m, shuffled)}) {
      // pairing bijection is validated at construction; flip properties:
      const CMatrix& delta = ctx.delta();
      CHECK(max_abs(CMatrix(delta * delta.adjoint()) -
                    CMatrix::Identity(m * m, m * m)) <= 1e-12);
      CHECK(max_abs(CMatrix(delta * delta) -
                    CMatrix::Identity(m * m, m * m)) <= 1e-12);

      // conjugating the diamond by the pairing recovers the Kronecker product
      CMatrix pairing = CMatrix::Zero(m * m, m * m);
      for (int k = 0; k < m * m; ++k) pairing(ctx.iota()[k], k) = 1.0;
      const CMatrix a = rng.gaussian_matrix(m, m);
      const CMatrix b = rng.gaussian_matrix(m, m);
      CHECK(max_abs(CMatrix(pairing * diamond(a, b, ctx) * pairing.adjoint()) -
                    kron(a, b)) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(DiamondContext(2, std::vector<int>{0, 1, 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DiamondContext(2, std::vector<int>{0, 1, 1, 3}),
                  std::invalid_argument);
}

TEST_CASE("diamond algebra") {
  Rng rng(19);
  const int m = 3;
  std::vector<int> shuffled = rng.permutation(m * m);
  for (const DiamondContext& ctx :
       {DiamondContext(m), DiamondContext(m, shuffled)}) {
    CHECK(max_abs(diamond(CMatrix::Identity(m, m), CMatrix::Identity(m, m),
                          ctx) -
                  CMatrix::Identity(m * m, m * m)) <= 1e-14);
    for (int k = 0; k < 8; ++k) {
      const CMatrix a = rng.gaussian_matrix(m, m);
      const CMatrix b = rng.gaussian_matrix(m, m);
      const CMatrix c = rng.gaussian_matrix(m, m);
      const CMatrix d = rng.gaussian_matrix(m, m);
      const double prod = op_norm(a) * op_norm(b);
      CHECK(std::abs(op_norm(diamond(a, b, ctx)) - prod) <= 1e-10 * prod);
      CHECK(max_abs(CMatrix(diamond(a, b, ctx) * diamond(c, d, ctx)) -
                    diamond(CMatrix(a * c), CMatrix(b * d), ctx)) <=
            1e-12 * prod * std::max(1.0, op_norm(c) * op_norm(d)));
      CHECK(max_abs(CMatrix(diamond(a, b, ctx).adjoint()) -
                    diamond(CMatrix(a.adjoint()), CMatrix(b.adjoint()), ctx)) <=
            1e-14);
    }
    CHECK_THROWS_AS(diamond(rng.gaussian_matrix(2, 2),
                            rng.gaussian_matrix(3, 3), ctx),
                    std::invalid_argument);
  }
}

TEST_CASE("flip conjugation") {
  Rng rng(23);
  const int m = 3;
  std::vector<int> shuffled = rng.permutation(m * m);
  for (const DiamondContext& ctx :
       {DiamondContext(m), DiamondContext(m, shuffled)}) {
    const CMatrix a = rng.gaussian_matrix(m, m);
    const CMatrix b = rng.gaussian_matrix(m, m);
    CHECK(max_abs(delta_conjugate(diamond(a, b, ctx), ctx) -
                  diamond(b, a, ctx)) <= 1e-12);
    CHECK(max_abs(delta_conjugate(CMatrix::Identity(m * m, m * m), ctx) -
                  CMatrix::Identity(m * m, m * m)) <= 1e-14);
    CHECK(max_abs(delta_conjugate(diamond(a, a, ctx), ctx) -
                  diamond(a, a, ctx)) <= 1e-12);
  }
  CHECK_THROWS_AS(delta_conjugate(CMatrix::Identity(3, 3), DiamondContext(2)),
                  std::invalid_argument);
}

TEST_CASE("partial isometries") {
  {
    const PartialIsometrySet set = make_partial_isometries(1, 1);
    CHECK(set.q.size() == 1);
    CHECK(max_abs(set.q[0] - CMatrix::Identity(1, 1)) == 0.0);
    CHECK(max_abs(set.initial_projection - CMatrix::Identity(1, 1)) == 0.0);
  }
  {
    const PartialIsometrySet set = make_partial_isometries(2, 2);
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) {
        const CMatrix prod = set.q[k].adjoint() * set.q[l];
        const CMatrix expected =
            k == l ? set.initial_projection
                   : CMatrix(CMatrix::Zero(2, 2));
        CHECK(max_abs(prod - expected) <= 1e-14);
      }
  }
  {
    const PartialIsometrySet set = make_partial_isometries(3, 4);
    CMatrix sum = CMatrix::Zero(4, 4);
    for (const CMatrix& q : set.q) sum += q.adjoint() * q;
    CHECK(max_abs(sum - 3.0 * set.initial_projection) <= 1e-14);
    // final projections pairwise orthogonal
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        if (k != l)
          CHECK(max_abs(CMatrix(set.q[k] * set.q[k].adjoint() * set.q[l] *
                                set.q[l].adjoint())) <= 1e-14);
  }
  CHECK_THROWS_AS(make_partial_isometries(3, 2), std::invalid_argument);
}

TEST_CASE("corner isometries") {
  {
    const auto s = make_corner_isometries(1, 3);
    CHECK(max_abs(s[0] - CMatrix::Identity(3, 3)) == 0.0);
  }
  {
    const auto s = make_corner_isometries(2, 2);
    CHECK(max_abs(CMatrix(s[0].adjoint() * s[1])) == 0.0);
    CHECK(max_abs(CMatrix(s[0].adjoint() * s[0]) - CMatrix::Identity(2, 2)) ==
          0.0);
    CHECK(max_abs(CMatrix(s[1].adjoint() * s[1]) - CMatrix::Identity(2, 2)) ==
          0.0);
  }
  {
    const auto s = make_corner_isometries(3, 2);
    CMatrix sum = CMatrix::Zero(6, 6);
    for (const CMatrix& sk : s) sum += sk * sk.adjoint();
    CHECK(max_abs(sum - CMatrix::Identity(6, 6)) == 0.0);
  }
  // isometries leave the operator norm unchanged
  Rng rng(29);
  const auto s = make_corner_isometries(3, 2);
  for (int k = 0; k < 3; ++k) {
    const CMatrix m = rng.gaussian_matrix(2, 5);
    CHECK(std::abs(op_norm(CMatrix(s[k] * m)) - op_norm(m)) <=
          1e-12 * op_norm(m));
  }
}

TEST_CASE("diamond factorization") {
  const DiamondContext ctx2(2);

  {  // zero reconstructs exactly
    const DiamondFactorization f =
        factor_through_diamond(CMatrix::Zero(4, 4), ctx2);
    CHECK(max_abs(f.b) == 0.0);
    CHECK(max_abs(f.c) == 0.0);
    CHECK(max_abs(f.b_prime) == 0.0);
  }

  for (int m : {2, 3}) {
    const DiamondContext ctx(m);
    for (int seed = 0; seed < 20; ++seed) {
      Rng rng(500 + 31 * m + seed);
      const CMatrix a = rng.gaussian_matrix(m * m, m * m);
      const DiamondFactorization f = factor_through_diamond(a, ctx);
      const CMatrix rebuilt = f.b * diamond(f.c, f.c, ctx) * f.b_prime;
      CHECK((a - rebuilt).norm() <= 1e-8 * a.norm());
    }
  }

  {  // diagonal positive input: the diamond square dominates the spectrum
    const int m = 2;
    const DiamondContext ctx(m);
    CMatrix a = CMatrix::Zero(4, 4);
    a.diagonal() << 4.0, 3.0, 2.0, 1.0;
    const DiamondFactorization f = factor_through_diamond(a, ctx);
    const CMatrix square = diamond(f.c, f.c, ctx);
    Eigen::JacobiSVD<CMatrix> svd_a(a);
    Eigen::JacobiSVD<CMatrix> svd_square(square);
    // both diagonal; compare the multisets slot by slot after sorting
    for (int i = 0; i < 4; ++i)
      CHECK(svd_square.singularValues()(i) + 1e-12 >=
            svd_a.singularValues()(i));
    const CMatrix rebuilt = f.b * square * f.b_prime;
    CHECK((a - rebuilt).norm() <= 1e-10);
  }

  // a shuffled pairing factors just as well
  Rng rng(41);
  std::vector<int> shuffled = rng.permutation(9);
  const DiamondContext ctx3(3, shuffled);
  const CMatrix a = rng.gaussian_matrix(9, 9);
  const DiamondFactorization f = factor_through_diamond(a, ctx3);
  CHECK((a - f.b * diamond(f.c, f.c, ctx3) * f.b_prime).norm() <=
        1e-8 * a.norm());

  CHECK_THROWS_AS(factor_through_diamond(CMatrix::Zero(3, 3), ctx2),
                  std::invalid_argument);
}
