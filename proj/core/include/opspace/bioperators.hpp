#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "opspace/quantum_space.hpp"

namespace opspace {

/// A bilinear map R: E×F → G encoded by its structure tensor on basis pairs:
/// R(x_i, y_j) = Σ_k c_{ijk}·z_k.
class Bioperator {
 public:
  Bioperator(SpacePtr dom_e, SpacePtr dom_f, SpacePtr cod_g,
             std::vector<Complex> structure);

  const SpacePtr& dom_e() const { return dom_e_; }
  const SpacePtr& dom_f() const { return dom_f_; }
  const SpacePtr& cod_g() const { return cod_g_; }

  Complex structure(std::size_t i, std::size_t j, std::size_t k) const {
    return structure_[(i * dim_f_ + j) * dim_g_ + k];
  }
  const std::vector<Complex>& structure() const { return structure_; }

  std::size_t dim_e() const { return dim_e_; }
  std::size_t dim_f() const { return dim_f_; }
  std::size_t dim_g() const { return dim_g_; }

 private:
  SpacePtr dom_e_;
  SpacePtr dom_f_;
  SpacePtr cod_g_;
  std::size_t dim_e_, dim_f_, dim_g_;
  std::vector<Complex> structure_;
};

/// The inner-product bifunctional H × H̄ → C on coordinates: (x,y) ↦ Σ x_i y_i.
/// The conjugation of the second slot is absorbed into the coordinates of the
/// conjugate space.
Bioperator make_inner_product(const SpacePtr& h, const SpacePtr& h_conj);

/// Product bifunctional f×g : E×F → C, (x,y) ↦ f(x)·g(y), from covectors on
/// the two bases.
Bioperator make_functional_product(const SpacePtr& e, const CVector& f,
                                   const SpacePtr& fspace, const CVector& g);

/// Scalar multiplication C×C → C.
Bioperator make_scalar_multiplication();

/// The canonical bioperator (x,y) ↦ x⊗y into the product space E⊗F.
Bioperator make_tensor_bioperator(const SpacePtr& e, const SpacePtr& f);

/// R^op(y,x) = R(x,y): the structure tensor transposed in its first two slots.
Bioperator opposite(const Bioperator& r);

/// Strong amplification: coefficients multiply, levels are preserved.
/// Output coefficient k is Σ_{ij} c_{ijk}·a_i·b_j.
AmplifiedElement strong_amplify(const Bioperator& r, const AmplifiedElement& u,
                                const AmplifiedElement& v);

/// Weak amplification: coefficients combine through the diamond, the level
/// becomes m². Output coefficient k is Σ_{ij} c_{ijk}·(a_i ◇ b_j).
AmplifiedElement weak_amplify(const Bioperator& r, const AmplifiedElement& u,
                              const AmplifiedElement& v,
                              const DiamondContext& ctx);

/// a ◇ u and u ◇ a on the coefficients; graded, so the level multiplies.
/// The ctx overloads require a square at the element's level; the ctx-free
/// overloads use the canonical pairing and allow mixed sizes.
AmplifiedElement diamond_act_left(const CMatrix& a, const AmplifiedElement& u,
                                  const DiamondContext& ctx);
AmplifiedElement diamond_act_left(const CMatrix& a, const AmplifiedElement& u);
AmplifiedElement diamond_act_right(const AmplifiedElement& u, const CMatrix& a,
                                   const DiamondContext& ctx);
AmplifiedElement diamond_act_right(const AmplifiedElement& u,
                                   const CMatrix& a);

struct BioperatorEstimate {
  double value = 0;  ///< best witnessed ratio; a lower bound on the norm
  int level = 0;
  AmplifiedElement witness_u;
  AmplifiedElement witness_v;
};

using WitnessPair = std::pair<AmplifiedElement, AmplifiedElement>;

/// Lower-bound estimates of the strong / weak completely bounded norms at a
/// fixed level: the supremum of the output norm over explored unit pairs.
/// Injected pairs are evaluated before the random search. Level-1 basis pairs
/// are always included, so the estimates dominate the underlying bioperator
/// norm on the basis.
BioperatorEstimate estimate_scb(const Bioperator& r, int level,
                                const Budget& budget, std::uint64_t seed,
                                std::span<const WitnessPair> injected = {});
BioperatorEstimate estimate_wcb(const Bioperator& r, int level,
                                const Budget& budget, std::uint64_t seed,
                                std::span<const WitnessPair> injected = {});

/// Realizes the strong amplification of a bifunctional f : H_r × K_c → C as
/// an operator composition: v, read as an operator out of the column leg,
/// composed with 1⊗φ (φ the matrix of f on coordinates) and with u. Returns
/// the m×m composition; it equals the single coefficient of
/// strong_amplify(f, v, u), and its norm is bounded by ‖f‖·‖v‖·‖u‖.
CMatrix compose_bifunctional(const Bioperator& f, const AmplifiedElement& v,
                             const AmplifiedElement& u);

struct CompressionIdentityReport {
  double weak_norm = 0;    ///< ‖R_w(u·P, P·v)‖
  double strong_norm = 0;  ///< ‖R_s(u◇P, P◇v)‖
  double deviation = 0;    ///< coefficient-wise difference of the two sides
  bool passed = false;
};

/// Checks the compression identity R_w(u·P, P·v) = R_s(u◇P, P◇v) for a
/// projection P at the level of u and v; both sides live at level m².
CompressionIdentityReport compression_identity_check(const Bioperator& r,
                                                     const AmplifiedElement& u,
                                                     const AmplifiedElement& v,
                                                     const CMatrix& p,
                                                     const DiamondContext& ctx);

}  // namespace opspace
