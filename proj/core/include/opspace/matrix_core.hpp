#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace opspace {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Largest singular value, i.e. the operator norm induced by the Euclidean
/// vector norms. Throws std::invalid_argument on an empty matrix.
double op_norm(const CMatrix& m);

/// Rank-one operator xi∘eta, the map zeta ↦ <zeta,eta>·xi. Inner products are
/// linear in the first slot and conjugate-linear in the second, so the matrix
/// is xi·eta^*. Throws on dimension mismatch.
CMatrix rank_one(const CVector& xi, const CVector& eta);

/// Kronecker product with the standard block convention:
/// (A⊗B)[i·p+k, j·q+l] = A(i,j)·B(k,l) for B of size p×q.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Pairing data for the graded diamond product at a fixed base level m.
///
/// `iota` realizes a unitary identification of C^{m²} with C^m ⊗ C^m: domain
/// basis vector k is sent to the Kronecker basis vector iota[k]. Any bijection
/// of {0,…,m²−1} is admissible; the default is the index pairing
/// i·m+j ↦ (i,j), under which the diamond coincides with the Kronecker
/// product. `delta` is the tensor flip pulled back through the pairing; it is
/// a self-inverse unitary and satisfies delta·(a◇b)·delta = b◇a.
class DiamondContext {
 public:
  explicit DiamondContext(int base_level);
  DiamondContext(int base_level, std::vector<int> iota);

  int base_level() const { return m_; }
  const std::vector<int>& iota() const { return iota_; }
  const std::vector<int>& iota_inverse() const { return iota_inv_; }
  const CMatrix& delta() const { return delta_; }

 private:
  int m_ = 0;
  std::vector<int> iota_;
  std::vector<int> iota_inv_;
  CMatrix delta_;
};

/// a ◇ b for m×m factors: the operator tensor product a⊗b read back through
/// the context's pairing, an m²×m² matrix. Multiplicative in both slots,
/// compatible with adjoints, and norm-multiplicative.
CMatrix diamond(const CMatrix& a, const CMatrix& b, const DiamondContext& ctx);

/// Mixed-size diamond with the canonical pairing. For a p×p and b q×q this is
/// the pq×pq Kronecker product; used where the two factors live at different
/// levels.
CMatrix diamond(const CMatrix& a, const CMatrix& b);

/// delta·M·delta for an m²×m² matrix M: swaps the two tensor legs.
CMatrix delta_conjugate(const CMatrix& m, const DiamondContext& ctx);

struct PartialIsometrySet {
  std::vector<CMatrix> q;      ///< q_k^* q_l = δ_kl · initial_projection
  CMatrix initial_projection;  ///< rank one
};

/// n partial isometries in M_m with the common rank-one initial projection
/// e_1∘e_1 and pairwise orthogonal final projections. Requires m ≥ n.
PartialIsometrySet make_partial_isometries(int n, int m);

/// n isometries C^m → C^{nm} onto pairwise orthogonal coordinate blocks:
/// S_k^* S_l = δ_kl·I_m and Σ_k S_k S_k^* = I_{nm}.
std::vector<CMatrix> make_corner_isometries(int n, int m);

/// Factorization a = b·(c◇c)·b′ of an m²×m² matrix through the diamond of a
/// single m×m factor.
struct DiamondFactorization {
  CMatrix b;        ///< m²×m²
  CMatrix c;        ///< m×m, diagonal with nonnegative entries
  CMatrix b_prime;  ///< m²×m²
};

/// Factor an m²×m² matrix a as b·(c◇c)·b′.
///
/// Route: singular value decomposition a = U·h·V^* with h diagonal; the
/// singular value at slot k is attached to the index pair of iota[k]. A
/// decreasing envelope t_n ≥ max{λ_{r,n}, λ_{n,r} : r ≤ n} gives
/// r_{r,s} = √(t_r·t_s) ≥ λ_{r,s}; with s_{r,s} = √(λ_{r,s}/r_{r,s}) and
/// f = diag(s), the factors are b = U·f, c = diag(√t), b′ = f·V^*.
/// Singular values below 1e−13 of the largest are treated as zero. The zero
/// matrix yields zero factors.
DiamondFactorization factor_through_diamond(const CMatrix& a,
                                            const DiamondContext& ctx);

}  // namespace opspace
