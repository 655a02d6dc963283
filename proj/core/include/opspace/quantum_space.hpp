#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "opspace/matrix_core.hpp"
#include "opspace/rng.hpp"

namespace opspace {

class Rng;

enum class SpaceKind {
  generic,
  column,
  row,
  conjugate_row,
  conjugate_column,
  spatial_product,
  finite_rank,
};

std::string to_string(SpaceKind kind);
SpaceKind space_kind_from_string(const std::string& name);

/// A concrete operator space: the span of a linearly independent list of
/// out_dim×in_dim matrices, viewed inside B(C^in_dim, C^out_dim). Linear
/// independence is verified at construction. Column-type spaces have
/// in_dim 1, row-type spaces out_dim 1. Products of two spaces remember
/// their factors so tensor elements can be regrouped.
class OperatorSpace {
 public:
  OperatorSpace(SpaceKind kind, int in_dim, int out_dim,
                std::vector<CMatrix> basis);

  SpaceKind kind() const { return kind_; }
  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  std::size_t dim() const { return basis_.size(); }
  const CMatrix& basis(std::size_t i) const { return basis_.at(i); }
  const std::vector<CMatrix>& basis() const { return basis_; }

  bool has_factors() const { return factor_left_ != nullptr; }
  const std::shared_ptr<const OperatorSpace>& factor_left() const {
    return factor_left_;
  }
  const std::shared_ptr<const OperatorSpace>& factor_right() const {
    return factor_right_;
  }

  bool same_as(const OperatorSpace& other) const;

 private:
  friend std::shared_ptr<const OperatorSpace> tensor_space(
      const std::shared_ptr<const OperatorSpace>&,
      const std::shared_ptr<const OperatorSpace>&);

  SpaceKind kind_;
  int in_dim_;
  int out_dim_;
  std::vector<CMatrix> basis_;
  std::shared_ptr<const OperatorSpace> factor_left_;
  std::shared_ptr<const OperatorSpace> factor_right_;
};

using SpacePtr = std::shared_ptr<const OperatorSpace>;

/// Column quantization of C^h: basis of standard h×1 columns.
SpacePtr make_column_hilbertian(int h);
/// Row quantization of C^h: basis of standard 1×h rows acting on conjugated
/// coordinates (the conjugation lives in the pairing conventions of the
/// bifunctionals, not in the stored matrices).
SpacePtr make_row_hilbertian(int h);
SpacePtr make_conjugate_row(int h);
SpacePtr make_conjugate_column(int h);
/// The scalars C, as the one-dimensional column space.
SpacePtr make_scalar_space();
/// Full matrix space M_{k×h} on the matrix unit basis (row-major order).
SpacePtr make_full_matrix_space(int k, int h);
/// Random dim-dimensional subspace of M_{k×h} with Gaussian basis matrices.
SpacePtr make_random_space(int dim, int k, int h, Rng& rng);
/// Product space E⊗F on the Kronecker basis x_i⊗y_j (second index fastest).
SpacePtr tensor_space(const SpacePtr& e, const SpacePtr& f);

/// An element of the amplification of a space at a given level m: one m×m
/// coefficient matrix per basis element. Immutable after construction.
class AmplifiedElement {
 public:
  AmplifiedElement(SpacePtr space, int level, std::vector<CMatrix> coeffs);

  static AmplifiedElement zero(SpacePtr space, int level);
  /// Elementary tensor a⊗x_slot.
  static AmplifiedElement elementary(SpacePtr space, std::size_t slot,
                                     const CMatrix& a);

  const SpacePtr& space() const { return space_; }
  int level() const { return level_; }
  const std::vector<CMatrix>& coeffs() const { return coeffs_; }
  const CMatrix& coeff(std::size_t i) const { return coeffs_.at(i); }

  /// Σ_i coeff_i ⊗ basis_i as a dense (m·out_dim)×(m·in_dim) matrix.
  CMatrix assembled() const;

  bool is_zero(double tol = 0.0) const;

  AmplifiedElement operator+(const AmplifiedElement& other) const;
  AmplifiedElement operator-(const AmplifiedElement& other) const;
  AmplifiedElement scaled(const Complex& factor) const;

 private:
  SpacePtr space_;
  int level_;
  std::vector<CMatrix> coeffs_;
};

/// Concrete quantum norm at the element's level: the operator norm of the
/// assembled matrix.
double amplified_norm(const AmplifiedElement& u);

/// Norm of a coefficient vector in the underlying normed space: the operator
/// norm of Σ_i x_i·basis_i. Agrees with the amplified norm of p⊗x for every
/// rank-one projection p.
double underlying_norm(const OperatorSpace& space, const CVector& coords);

/// Two-sided module action a·u·b on the coefficients.
AmplifiedElement module_action(const CMatrix& a, const AmplifiedElement& u,
                               const CMatrix& b);

struct OrthogonalSupportReport {
  double norm_u = 0;
  double norm_v = 0;
  double norm_sum = 0;
  double deviation = 0;  ///< |‖u+v‖ − max(‖u‖,‖v‖)|
  bool passed = false;   ///< deviation ≤ 1e−10 · max(‖u‖,‖v‖)
};

/// Checks the second Ruan axiom on a pair with orthogonal supports:
/// ‖u+v‖ = max(‖u‖,‖v‖). Preconditions (P a support of u, Q of v, PQ = 0)
/// are validated and a violation throws naming the failing condition.
OrthogonalSupportReport check_ruan_rii(const AmplifiedElement& u,
                                       const AmplifiedElement& v,
                                       const CMatrix& p, const CMatrix& q);

/// Witness Σ_k q_k^*⊗e_k built from n partial isometries at level m over a
/// column/row Hilbertian of dimension ≥ n. Norm 1 on column spaces, √n on
/// row spaces.
AmplifiedElement make_omega(int n, int m, const SpacePtr& h);
/// Witness Σ_k q_k⊗e_k; norm √n on column spaces, 1 on row spaces.
AmplifiedElement make_varpi(int n, int m, const SpacePtr& h);

/// Norm-preserving level change: zero-pads every coefficient into the
/// top-left corner of a new_level×new_level matrix. Requires new_level ≥ level.
AmplifiedElement corner_embed(const AmplifiedElement& u, int new_level);

/// Optimization budget for the witness searches: outer random restarts and
/// hill-climbing iterations per restart.
struct Budget {
  int restarts = 32;
  int iterations = 200;
};

/// A linear map between spaces given by its matrix on the bases
/// (codomain dim × domain dim). Its amplification applies the matrix to the
/// basis slot of an element and leaves coefficients untouched.
class LinearMap {
 public:
  LinearMap(SpacePtr dom, SpacePtr cod, CMatrix matrix);
  static LinearMap identity(SpacePtr dom, SpacePtr cod);
  /// Functional E → C from a covector (one scalar per basis element).
  static LinearMap functional(SpacePtr dom, const CVector& covector);

  const SpacePtr& dom() const { return dom_; }
  const SpacePtr& cod() const { return cod_; }
  const CMatrix& matrix() const { return matrix_; }

  AmplifiedElement amplify(const AmplifiedElement& u) const;

 private:
  SpacePtr dom_;
  SpacePtr cod_;
  CMatrix matrix_;
};

struct CbEstimate {
  double value = 0;  ///< best witnessed ratio ‖φ∞(u)‖ / ‖u‖; a lower bound
  int level = 0;
  AmplifiedElement witness;
};

/// Lower-bound estimate of the completely bounded norm of phi at a fixed
/// level. Random-restart hill climbing over unit-norm elements, maximizing
/// the image norm; every reported value is achieved by the stored witness.
/// Injected elements are evaluated before the random search and the restarts
/// are seeded deterministically from (seed, restart index).
CbEstimate cb_norm_estimate(const LinearMap& phi, int level,
                            const Budget& budget, std::uint64_t seed,
                            std::span<const AmplifiedElement> injected = {});

/// Exact underlying-norm of a functional where the space supports it
/// (Euclidean norm on Hilbertians, nuclear norm on full matrix spaces);
/// otherwise a certified upper bound via a Hahn–Banach style extension to the
/// ambient matrix space.
double functional_norm_upper(const OperatorSpace& space,
                             const CVector& covector);

}  // namespace opspace
