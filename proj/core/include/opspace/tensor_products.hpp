#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opspace/bioperators.hpp"

namespace opspace {

/// Effros symbol u ⊙ v: the strong amplification of the canonical tensor
/// bioperator. Level is preserved; on elementary tensors
/// (a⊗x) ⊙ (b⊗y) = (ab)⊗(x⊗y). Balanced: (u·a) ⊙ v = u ⊙ (a·v).
AmplifiedElement effros(const AmplifiedElement& u, const AmplifiedElement& v);

/// Diamond tensor u ◇ v: the weak amplification of the canonical tensor
/// bioperator. The level becomes m²; on elementary tensors
/// (a⊗x) ◇ (b⊗y) = (a◇b)⊗(x⊗y).
AmplifiedElement diamond_tensor(const AmplifiedElement& u,
                                const AmplifiedElement& v,
                                const DiamondContext& ctx);
/// Canonical pairing; allows factors at different levels.
AmplifiedElement diamond_tensor(const AmplifiedElement& u,
                                const AmplifiedElement& v);

struct EffrosTerm {
  AmplifiedElement u;
  AmplifiedElement v;
  double value() const;  ///< ‖u‖·‖v‖
};

/// One summand a·(u◇v)·b. The diamond is canonical, so left/right have size
/// level(u)·level(v).
struct RiggedTerm {
  CMatrix left;
  AmplifiedElement u;
  AmplifiedElement v;
  CMatrix right;
  double value() const;  ///< ‖a‖·‖u‖·‖v‖·‖b‖
};

struct TensorRepresentation {
  enum class Kind { effros_list, single_effros, rigged_list, single_rigged };

  Kind kind = Kind::effros_list;
  std::vector<EffrosTerm> effros_terms;
  std::vector<RiggedTerm> rigged_terms;

  static TensorRepresentation single(EffrosTerm term);
  static TensorRepresentation single(RiggedTerm term);
  static TensorRepresentation list(std::vector<EffrosTerm> terms);
  static TensorRepresentation list(std::vector<RiggedTerm> terms);

  bool is_effros() const {
    return kind == Kind::effros_list || kind == Kind::single_effros;
  }
  double value() const;  ///< Σ over terms of the term values
};

/// The element a representation stands for: Σ u_k⊙v_k, respectively
/// Σ a_k·(u_k◇v_k)·b_k. Terms must share spaces and levels.
AmplifiedElement represented_element(const TensorRepresentation& rep);

/// Collapse a list of Effros terms into a single one at level n·m by moving
/// the k-th term into the k-th corner block: u = Σ u_k·Ŝ_k^*, v = Σ Ŝ_k·v_k.
/// The result reproduces the corner embedding of the original sum, and
/// ‖u‖ ≤ (Σ‖u_k‖²)^{1/2}, ‖v‖ ≤ (Σ‖v_k‖²)^{1/2} after the terms are rescaled
/// to ‖u_k‖ = ‖v_k‖.
EffrosTerm merge_effros(const std::vector<EffrosTerm>& terms);

/// Collapse a list of rigged terms (uniform levels) into a single one:
/// u = Σ S_k·u_k·S_k^*, v likewise, riggers pushed through the block pairing
/// isometries. Reproduces the pairing embedding of the original sum; after
/// normalization ‖u‖ = ‖v‖ = 1 and ‖a‖ ≤ (Σ‖a_k‖²)^{1/2}.
RiggedTerm merge_rigged(const std::vector<RiggedTerm>& terms);

/// The isometry C^{m²} → C^{M²} (m ≤ M) induced by corner embedding on both
/// tensor legs; conjugation by it is how level-m² riggers embed at level M².
CMatrix pair_embed_isometry(int m, int big_m);

/// Norm in the spatial tensor product: assembles Σ c_{ij} ⊗ x_i ⊗ y_j through
/// a double Kronecker product and takes the operator norm. Requires the
/// element's space to be a product space. A lower bound for the Haagerup norm.
double spatial_norm(const AmplifiedElement& u);

enum class LowerMethod { spatial, functional_pairing };
enum class UpperMethod { raw_representation, merged_gauged };

std::string to_string(LowerMethod m);
std::string to_string(UpperMethod m);

/// Certified interval around a tensor norm. The upper bound carries a
/// reconstructing representation (verified by reassembly before it is
/// accepted); the lower bound is achieved by a spatial assembly or a
/// functional pairing, both genuine lower bounds at every representation.
struct NormBracket {
  double lower = 0;
  double upper = 0;
  LowerMethod lower_method = LowerMethod::spatial;
  UpperMethod upper_method = UpperMethod::raw_representation;
  TensorRepresentation witness;
  double gap() const { return upper - lower; }
  bool resolved(double rel_tol) const;
};

/// Merge two brackets for the same element: max of lowers, min of uppers.
NormBracket combine(const NormBracket& a, const NormBracket& b);

/// Bracket around the Haagerup norm of the element represented by an Effros
/// representation. Upper: min over the raw value, the merged single term, a
/// positive-definite gauge optimization of the merged term (u·a, a^{-1}·v),
/// and — when the left factor is a column space or the right factor a row
/// space — the exact single-term representation built from block partial
/// isometries. Lower: max of the spatial norm and sampled unit functional
/// pairings.
NormBracket haagerup_bracket(const TensorRepresentation& rep,
                             const Budget& budget, std::uint64_t seed);

/// Bracket around the operator-projective tensor norm of the element
/// represented by a rigged representation. An Effros representation is
/// accepted and converted by factoring each basis coefficient through the
/// diamond (the element is corner-embedded to a perfect-square level first;
/// the embedding is norm-preserving). Lower bounds are the Haagerup lower
/// bounds, valid since the Haagerup norm never exceeds the projective one.
NormBracket projective_bracket(const TensorRepresentation& rep,
                               const Budget& budget, std::uint64_t seed);

/// Exact single Effros representation of an element of H⊗E with a column
/// left factor: U = ω ⊙ u at level h·m with ‖ω‖ = 1 and ‖u‖ equal to the
/// spatial norm. The represented element is the corner embedding of U.
EffrosTerm column_left_representation(const AmplifiedElement& u_elem);
/// Mirror for a row right factor: U = u ⊙ v with ‖v‖ = 1.
EffrosTerm row_right_representation(const AmplifiedElement& u_elem);

/// From a single Effros term over E⊗H with a column right factor, the rigged
/// term (1, u, ω, b) with b = Σ a_k◇q_k; it represents U◇P (norm-equal to U)
/// and its value equals ‖u‖·‖v‖.
RiggedTerm column_right_rigging(const EffrosTerm& term);
/// Mirror for a row left factor: (b, ϖ, u, 1) representing P◇U.
RiggedTerm row_left_rigging(const EffrosTerm& term);

enum class EqualityCase {
  col_haagerup_spatial,    ///< H_c ⊗ E: Haagerup norm equals spatial norm
  row_haagerup_spatial,    ///< E ⊗ H_r: Haagerup norm equals spatial norm
  column_row_rank_one,     ///< H_c ⊗ H̄_r realized as finite-rank operators
  col_projective_haagerup, ///< E ⊗ H_c: projective norm equals Haagerup norm
  row_projective_haagerup, ///< H_r ⊗ E: projective norm equals Haagerup norm
  column_square_chain,     ///< H_c ⊗ H_c: all three norms agree, column law
  row_square_chain,        ///< H_r ⊗ H_r: all three norms agree, row law
};

std::string to_string(EqualityCase c);
std::optional<EqualityCase> equality_case_from_string(const std::string& s);
std::vector<EqualityCase> all_equality_cases();

struct EqualityDims {
  int hilbert_dim = 2;  ///< dimension of the Hilbert factor(s)
  int level = 2;        ///< coefficient level of the random instance
  SpacePtr e;           ///< the generic factor, where the case uses one
};

struct EqualityReport {
  EqualityCase case_tag;
  std::uint64_t seed = 0;
  double lower = 0;
  double upper = 0;
  double gap_rel = 0;
  LowerMethod lower_method = LowerMethod::spatial;
  UpperMethod upper_method = UpperMethod::raw_representation;
  bool resolved = false;
  std::string detail;
};

/// Runs the constructive certificate for one exact-equality case on a random
/// instance and reports the achieved bracket gap. Assembled matrices are
/// capped at dimension 4096.
EqualityReport equality_suite(EqualityCase c, const EqualityDims& dims,
                              std::uint64_t seed);

}  // namespace opspace
