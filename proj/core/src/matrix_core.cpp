#include "opspace/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opspace {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

double op_norm(const CMatrix& m) {
  require(m.size() > 0, "op_norm: empty matrix");
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  if (std::min(m.rows(), m.cols()) <= 24)
    return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
  return Eigen::BDCSVD<CMatrix>(m).singularValues()(0);
}

CMatrix rank_one(const CVector& xi, const CVector& eta) {
  require(xi.size() == eta.size(), "rank_one: vectors of different dimension");
  require(xi.size() > 0, "rank_one: empty vectors");
  return xi * eta.adjoint();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DiamondContext::DiamondContext(int base_level)
    : DiamondContext(base_level, [&] {
        std::vector<int> id(static_cast<std::size_t>(base_level) * base_level);
        for (std::size_t k = 0; k < id.size(); ++k) id[k] = static_cast<int>(k);
        return id;
      }()) {}

DiamondContext::DiamondContext(int base_level, std::vector<int> iota)
    : m_(base_level), iota_(std::move(iota)) {
  require(m_ >= 1, "DiamondContext: base level must be positive");
  const int mm = m_ * m_;
  require(static_cast<int>(iota_.size()) == mm,
          "DiamondContext: pairing must have m^2 entries");
  iota_inv_.assign(mm, -1);
  for (int k = 0; k < mm; ++k) {
    require(iota_[k] >= 0 && iota_[k] < mm && iota_inv_[iota_[k]] == -1,
            "DiamondContext: pairing is not a bijection");
    iota_inv_[iota_[k]] = k;
  }
  // delta = iota^* · flip · iota, where the flip swaps the Kronecker legs.
  delta_ = CMatrix::Zero(mm, mm);
  for (int l = 0; l < mm; ++l) {
    const int i = iota_[l] / m_, j = iota_[l] % m_;
    delta_(iota_inv_[j * m_ + i], l) = 1.0;
  }
}

CMatrix diamond(const CMatrix& a, const CMatrix& b, const DiamondContext& ctx) {
  const int m = ctx.base_level();
  require(a.rows() == m && a.cols() == m && b.rows() == m && b.cols() == m,
          "diamond: factors must be square at the context's base level");
  const CMatrix k = kron(a, b);
  const int mm = m * m;
  CMatrix out(mm, mm);
  for (int r = 0; r < mm; ++r)
    for (int c = 0; c < mm; ++c) out(r, c) = k(ctx.iota()[r], ctx.iota()[c]);
  return out;
}

CMatrix diamond(const CMatrix& a, const CMatrix& b) { return kron(a, b); }

CMatrix delta_conjugate(const CMatrix& m, const DiamondContext& ctx) {
  const int mm = ctx.base_level() * ctx.base_level();
  require(m.rows() == mm && m.cols() == mm,
          "delta_conjugate: matrix must have size m^2");
  return ctx.delta() * m * ctx.delta();
}

PartialIsometrySet make_partial_isometries(int n, int m) {
  require(n >= 1, "make_partial_isometries: need at least one isometry");
  require(m >= n, "make_partial_isometries: level too small, need m >= n");
  PartialIsometrySet out;
  out.initial_projection = CMatrix::Zero(m, m);
  out.initial_projection(0, 0) = 1.0;
  out.q.reserve(n);
  for (int k = 0; k < n; ++k) {
    CMatrix q = CMatrix::Zero(m, m);
    q(k, 0) = 1.0;  // e_k ∘ e_1
    out.q.push_back(std::move(q));
  }
  return out;
}

std::vector<CMatrix> make_corner_isometries(int n, int m) {
  require(n >= 1 && m >= 1, "make_corner_isometries: sizes must be positive");
  std::vector<CMatrix> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    CMatrix s = CMatrix::Zero(static_cast<Eigen::Index>(n) * m, m);
    s.block(static_cast<Eigen::Index>(k) * m, 0, m, m) =
        CMatrix::Identity(m, m);
    out.push_back(std::move(s));
  }
  return out;
}

DiamondFactorization factor_through_diamond(const CMatrix& a,
                                            const DiamondContext& ctx) {
  const int m = ctx.base_level();
  const int mm = m * m;
  require(a.rows() == mm && a.cols() == mm,
          "factor_through_diamond: matrix must have size m^2");

  DiamondFactorization out;
  if (a.isZero(0.0)) {
    out.b = CMatrix::Zero(mm, mm);
    out.c = CMatrix::Zero(m, m);
    out.b_prime = CMatrix::Zero(mm, mm);
    return out;
  }

  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sigma = svd.singularValues();
  const double cutoff = 1e-13 * sigma(0);

  // Singular value at slot k is attached to the index pair of iota[k].
  std::vector<double> lambda(mm, 0.0);
  for (int k = 0; k < mm; ++k)
    lambda[ctx.iota()[k]] = sigma(k) < cutoff ? 0.0 : sigma(k);

  // Decreasing envelope dominating every pair that touches index n.
  std::vector<double> t(m, 0.0);
  for (int r = 0; r < m; ++r)
    for (int s = 0; s < m; ++s)
      t[std::max(r, s)] = std::max(t[std::max(r, s)], lambda[r * m + s]);
  for (int n = m - 2; n >= 0; --n) t[n] = std::max(t[n], t[n + 1]);

  out.c = CMatrix::Zero(m, m);
  for (int n = 0; n < m; ++n) out.c(n, n) = std::sqrt(t[n]);

  CMatrix f = CMatrix::Zero(mm, mm);
  for (int k = 0; k < mm; ++k) {
    const int r = ctx.iota()[k] / m, s = ctx.iota()[k] % m;
    const double rv = std::sqrt(t[r] * t[s]);
    f(k, k) = rv > 0.0 ? std::sqrt(lambda[r * m + s] / rv) : 0.0;
  }

  out.b = svd.matrixU() * f;
  out.b_prime = f * svd.matrixV().adjoint();
  return out;
}

}  // namespace opspace
