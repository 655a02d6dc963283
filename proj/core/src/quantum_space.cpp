#include "opspace/quantum_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "opspace/rng.hpp"

namespace opspace {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

CMatrix vec_as_row(const CMatrix& m) {
  CMatrix row(1, m.size());
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) row(0, c++) = m(i, j);
  return row;
}

bool approx_projection(const CMatrix& p, double tol) {
  if (p.rows() != p.cols()) return false;
  return (p * p - p).norm() <= tol * (1.0 + p.norm()) &&
         (p - p.adjoint()).norm() <= tol * (1.0 + p.norm());
}

}  // namespace

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::generic: return "generic";
    case SpaceKind::column: return "column";
    case SpaceKind::row: return "row";
    case SpaceKind::conjugate_row: return "conjugate_row";
    case SpaceKind::conjugate_column: return "conjugate_column";
    case SpaceKind::spatial_product: return "spatial_product";
    case SpaceKind::finite_rank: return "finite_rank";
  }
  return "generic";
}

SpaceKind space_kind_from_string(const std::string& name) {
  if (name == "generic") return SpaceKind::generic;
  if (name == "column") return SpaceKind::column;
  if (name == "row") return SpaceKind::row;
  if (name == "conjugate_row") return SpaceKind::conjugate_row;
  if (name == "conjugate_column") return SpaceKind::conjugate_column;
  if (name == "spatial_product") return SpaceKind::spatial_product;
  if (name == "finite_rank") return SpaceKind::finite_rank;
  throw std::invalid_argument("unknown space kind: " + name);
}

OperatorSpace::OperatorSpace(SpaceKind kind, int in_dim, int out_dim,
                             std::vector<CMatrix> basis)
    : kind_(kind), in_dim_(in_dim), out_dim_(out_dim),
      basis_(std::move(basis)) {
  require(in_dim_ >= 1 && out_dim_ >= 1,
          "OperatorSpace: dimensions must be positive");
  require(!basis_.empty(), "OperatorSpace: empty basis");
  for (const CMatrix& b : basis_)
    require(b.rows() == out_dim_ && b.cols() == in_dim_,
            "OperatorSpace: basis matrix has wrong shape");
  if (kind_ == SpaceKind::column || kind_ == SpaceKind::conjugate_column)
    require(in_dim_ == 1, "OperatorSpace: column spaces map out of C");
  if (kind_ == SpaceKind::row || kind_ == SpaceKind::conjugate_row)
    require(out_dim_ == 1, "OperatorSpace: row spaces map into C");

  CMatrix stacked(static_cast<Eigen::Index>(basis_.size()),
                  static_cast<Eigen::Index>(in_dim_) * out_dim_);
  for (std::size_t i = 0; i < basis_.size(); ++i)
    stacked.row(static_cast<Eigen::Index>(i)) = vec_as_row(basis_[i]);
  Eigen::ColPivHouseholderQR<CMatrix> qr(stacked);
  require(qr.rank() == static_cast<Eigen::Index>(basis_.size()),
          "OperatorSpace: basis is linearly dependent");
}

bool OperatorSpace::same_as(const OperatorSpace& other) const {
  if (this == &other) return true;
  if (kind_ != other.kind_ || in_dim_ != other.in_dim_ ||
      out_dim_ != other.out_dim_ || basis_.size() != other.basis_.size())
    return false;
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (basis_[i] != other.basis_[i]) return false;
  return true;
}

namespace {

std::vector<CMatrix> standard_columns(int h) {
  std::vector<CMatrix> basis;
  basis.reserve(h);
  for (int k = 0; k < h; ++k) {
    CMatrix e = CMatrix::Zero(h, 1);
    e(k, 0) = 1.0;
    basis.push_back(std::move(e));
  }
  return basis;
}

std::vector<CMatrix> standard_rows(int h) {
  std::vector<CMatrix> basis;
  basis.reserve(h);
  for (int k = 0; k < h; ++k) {
    CMatrix e = CMatrix::Zero(1, h);
    e(0, k) = 1.0;
    basis.push_back(std::move(e));
  }
  return basis;
}

}  // namespace

SpacePtr make_column_hilbertian(int h) {
  require(h >= 1, "make_column_hilbertian: dimension must be positive");
  return std::make_shared<OperatorSpace>(SpaceKind::column, 1, h,
                                         standard_columns(h));
}

SpacePtr make_row_hilbertian(int h) {
  require(h >= 1, "make_row_hilbertian: dimension must be positive");
  return std::make_shared<OperatorSpace>(SpaceKind::row, h, 1,
                                         standard_rows(h));
}

SpacePtr make_conjugate_row(int h) {
  require(h >= 1, "make_conjugate_row: dimension must be positive");
  return std::make_shared<OperatorSpace>(SpaceKind::conjugate_row, h, 1,
                                         standard_rows(h));
}

SpacePtr make_conjugate_column(int h) {
  require(h >= 1, "make_conjugate_column: dimension must be positive");
  return std::make_shared<OperatorSpace>(SpaceKind::conjugate_column, 1, h,
                                         standard_columns(h));
}

SpacePtr make_scalar_space() { return make_column_hilbertian(1); }

SpacePtr make_full_matrix_space(int k, int h) {
  require(k >= 1 && h >= 1, "make_full_matrix_space: bad dimensions");
  std::vector<CMatrix> basis;
  basis.reserve(static_cast<std::size_t>(k) * h);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < h; ++j) {
      CMatrix e = CMatrix::Zero(k, h);
      e(i, j) = 1.0;
      basis.push_back(std::move(e));
    }
  return std::make_shared<OperatorSpace>(SpaceKind::finite_rank, h, k,
                                         std::move(basis));
}

SpacePtr make_random_space(int dim, int k, int h, Rng& rng) {
  require(dim >= 1 && dim <= k * h, "make_random_space: bad dimension");
  for (int attempt = 0; attempt < 16; ++attempt) {
    std::vector<CMatrix> basis;
    basis.reserve(dim);
    for (int i = 0; i < dim; ++i) basis.push_back(rng.gaussian_matrix(k, h));
    try {
      return std::make_shared<OperatorSpace>(SpaceKind::generic, h, k,
                                             std::move(basis));
    } catch (const std::invalid_argument&) {
      // dependent draw, retry
    }
  }
  throw std::runtime_error("make_random_space: could not draw a basis");
}

SpacePtr tensor_space(const SpacePtr& e, const SpacePtr& f) {
  require(e != nullptr && f != nullptr, "tensor_space: null factor");
  std::vector<CMatrix> basis;
  basis.reserve(e->dim() * f->dim());
  for (std::size_t i = 0; i < e->dim(); ++i)
    for (std::size_t j = 0; j < f->dim(); ++j) {
      CMatrix prod = kron(e->basis(i), f->basis(j));
      basis.push_back(std::move(prod));
    }
  auto space = std::make_shared<OperatorSpace>(
      SpaceKind::spatial_product, e->in_dim() * f->in_dim(),
      e->out_dim() * f->out_dim(), std::move(basis));
  space->factor_left_ = e;
  space->factor_right_ = f;
  return space;
}

AmplifiedElement::AmplifiedElement(SpacePtr space, int level,
                                   std::vector<CMatrix> coeffs)
    : space_(std::move(space)), level_(level), coeffs_(std::move(coeffs)) {
  require(space_ != nullptr, "AmplifiedElement: null space");
  require(level_ >= 1, "AmplifiedElement: level must be positive");
  require(coeffs_.size() == space_->dim(),
          "AmplifiedElement: one coefficient per basis element required");
  for (const CMatrix& c : coeffs_)
    require(c.rows() == level_ && c.cols() == level_,
            "AmplifiedElement: coefficient has wrong size");
}

AmplifiedElement AmplifiedElement::zero(SpacePtr space, int level) {
  require(space != nullptr, "AmplifiedElement::zero: null space");
  std::vector<CMatrix> coeffs(space->dim(), CMatrix::Zero(level, level));
  return AmplifiedElement(std::move(space), level, std::move(coeffs));
}

AmplifiedElement AmplifiedElement::elementary(SpacePtr space, std::size_t slot,
                                              const CMatrix& a) {
  require(space != nullptr, "AmplifiedElement::elementary: null space");
  require(slot < space->dim(), "AmplifiedElement::elementary: bad slot");
  require(a.rows() == a.cols() && a.rows() >= 1,
          "AmplifiedElement::elementary: coefficient must be square");
  std::vector<CMatrix> coeffs(space->dim(),
                              CMatrix::Zero(a.rows(), a.cols()));
  coeffs[slot] = a;
  return AmplifiedElement(std::move(space), static_cast<int>(a.rows()),
                          std::move(coeffs));
}

CMatrix AmplifiedElement::assembled() const {
  CMatrix out = CMatrix::Zero(
      static_cast<Eigen::Index>(level_) * space_->out_dim(),
      static_cast<Eigen::Index>(level_) * space_->in_dim());
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    out += kron(coeffs_[i], space_->basis(i));
  return out;
}

bool AmplifiedElement::is_zero(double tol) const {
  for (const CMatrix& c : coeffs_)
    if (!c.isZero(tol)) return false;
  return true;
}

AmplifiedElement AmplifiedElement::operator+(
    const AmplifiedElement& other) const {
  require(level_ == other.level_, "element addition: level mismatch");
  require(space_->same_as(*other.space_), "element addition: space mismatch");
  std::vector<CMatrix> coeffs(coeffs_.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    coeffs[i] = coeffs_[i] + other.coeffs_[i];
  return AmplifiedElement(space_, level_, std::move(coeffs));
}

AmplifiedElement AmplifiedElement::operator-(
    const AmplifiedElement& other) const {
  return *this + other.scaled(-1.0);
}

AmplifiedElement AmplifiedElement::scaled(const Complex& factor) const {
  std::vector<CMatrix> coeffs(coeffs_.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    coeffs[i] = factor * coeffs_[i];
  return AmplifiedElement(space_, level_, std::move(coeffs));
}

double amplified_norm(const AmplifiedElement& u) {
  return op_norm(u.assembled());
}

double underlying_norm(const OperatorSpace& space, const CVector& coords) {
  require(static_cast<std::size_t>(coords.size()) == space.dim(),
          "underlying_norm: one coordinate per basis element required");
  CMatrix sum = CMatrix::Zero(space.out_dim(), space.in_dim());
  for (std::size_t i = 0; i < space.dim(); ++i)
    sum += coords(static_cast<Eigen::Index>(i)) * space.basis(i);
  return op_norm(sum);
}

AmplifiedElement module_action(const CMatrix& a, const AmplifiedElement& u,
                               const CMatrix& b) {
  require(a.rows() == u.level() && a.cols() == u.level() &&
              b.rows() == u.level() && b.cols() == u.level(),
          "module_action: operators must be square at the element's level");
  std::vector<CMatrix> coeffs(u.coeffs().size());
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    coeffs[i] = a * u.coeff(i) * b;
  return AmplifiedElement(u.space(), u.level(), std::move(coeffs));
}

OrthogonalSupportReport check_ruan_rii(const AmplifiedElement& u,
                                       const AmplifiedElement& v,
                                       const CMatrix& p, const CMatrix& q) {
  constexpr double kTol = 1e-12;
  require(u.level() == v.level(), "check_ruan_rii: level mismatch");
  require(u.space()->same_as(*v.space()), "check_ruan_rii: space mismatch");
  require(p.rows() == u.level() && p.cols() == u.level() &&
              q.rows() == u.level() && q.cols() == u.level(),
          "check_ruan_rii: projections must match the level");
  require(approx_projection(p, kTol), "check_ruan_rii: P is not a projection");
  require(approx_projection(q, kTol), "check_ruan_rii: Q is not a projection");
  for (const CMatrix& c : u.coeffs())
    require((p * c * p - c).norm() <= kTol * (1.0 + c.norm()),
            "check_ruan_rii: P is not a support of u");
  for (const CMatrix& c : v.coeffs())
    require((q * c * q - c).norm() <= kTol * (1.0 + c.norm()),
            "check_ruan_rii: Q is not a support of v");
  require((p * q).norm() <= kTol * (1.0 + p.norm() * q.norm()),
          "check_ruan_rii: supports are not orthogonal");

  OrthogonalSupportReport report;
  report.norm_u = amplified_norm(u);
  report.norm_v = amplified_norm(v);
  report.norm_sum = amplified_norm(u + v);
  const double expected = std::max(report.norm_u, report.norm_v);
  report.deviation = std::abs(report.norm_sum - expected);
  report.passed = report.deviation <= 1e-10 * std::max(expected, 1.0);
  return report;
}

namespace {

bool hilbertian_kind(SpaceKind k) {
  return k == SpaceKind::column || k == SpaceKind::row ||
         k == SpaceKind::conjugate_column || k == SpaceKind::conjugate_row;
}

AmplifiedElement isometry_witness(int n, int m, const SpacePtr& h,
                                  bool adjoint) {
  if (h == nullptr || !hilbertian_kind(h->kind()))
    throw std::invalid_argument("witness: need a column or row Hilbertian");
  if (static_cast<std::size_t>(n) > h->dim())
    throw std::invalid_argument("witness: Hilbert dimension too small");
  if (m < n) throw std::invalid_argument("witness: level too small");
  const PartialIsometrySet set = make_partial_isometries(n, m);
  std::vector<CMatrix> coeffs(h->dim(), CMatrix::Zero(m, m));
  for (int k = 0; k < n; ++k)
    coeffs[k] = adjoint ? CMatrix(set.q[k].adjoint()) : set.q[k];
  return AmplifiedElement(h, m, std::move(coeffs));
}

}  // namespace

AmplifiedElement make_omega(int n, int m, const SpacePtr& h) {
  return isometry_witness(n, m, h, /*adjoint=*/true);
}

AmplifiedElement make_varpi(int n, int m, const SpacePtr& h) {
  return isometry_witness(n, m, h, /*adjoint=*/false);
}

AmplifiedElement corner_embed(const AmplifiedElement& u, int new_level) {
  require(new_level >= u.level(),
          "corner_embed: target level below the element's level");
  if (new_level == u.level()) return u;
  std::vector<CMatrix> coeffs(u.coeffs().size(),
                              CMatrix::Zero(new_level, new_level));
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    coeffs[i].topLeftCorner(u.level(), u.level()) = u.coeff(i);
  return AmplifiedElement(u.space(), new_level, std::move(coeffs));
}

LinearMap::LinearMap(SpacePtr dom, SpacePtr cod, CMatrix matrix)
    : dom_(std::move(dom)), cod_(std::move(cod)), matrix_(std::move(matrix)) {
  require(dom_ != nullptr && cod_ != nullptr, "LinearMap: null space");
  require(matrix_.rows() == static_cast<Eigen::Index>(cod_->dim()) &&
              matrix_.cols() == static_cast<Eigen::Index>(dom_->dim()),
          "LinearMap: basis dimension mismatch");
}

LinearMap LinearMap::identity(SpacePtr dom, SpacePtr cod) {
  require(dom != nullptr && cod != nullptr && dom->dim() == cod->dim(),
          "LinearMap::identity: dimension mismatch");
  const auto n = static_cast<Eigen::Index>(dom->dim());
  return LinearMap(std::move(dom), std::move(cod), CMatrix::Identity(n, n));
}

LinearMap LinearMap::functional(SpacePtr dom, const CVector& covector) {
  require(dom != nullptr &&
              static_cast<std::size_t>(covector.size()) == dom->dim(),
          "LinearMap::functional: covector dimension mismatch");
  CMatrix m(1, covector.size());
  m.row(0) = covector.transpose();
  return LinearMap(std::move(dom), make_scalar_space(), std::move(m));
}

AmplifiedElement LinearMap::amplify(const AmplifiedElement& u) const {
  require(u.space()->same_as(*dom_), "LinearMap: element not in the domain");
  std::vector<CMatrix> coeffs(cod_->dim(),
                              CMatrix::Zero(u.level(), u.level()));
  for (std::size_t j = 0; j < cod_->dim(); ++j)
    for (std::size_t i = 0; i < dom_->dim(); ++i) {
      const Complex w = matrix_(static_cast<Eigen::Index>(j),
                                static_cast<Eigen::Index>(i));
      if (w != Complex(0, 0)) coeffs[j] += w * u.coeff(i);
    }
  return AmplifiedElement(cod_, u.level(), std::move(coeffs));
}

CbEstimate cb_norm_estimate(const LinearMap& phi, int level,
                            const Budget& budget, std::uint64_t seed,
                            std::span<const AmplifiedElement> injected) {
  require(level >= 1, "cb_norm_estimate: level must be positive");
  require(budget.restarts >= 1 && budget.iterations >= 1,
          "cb_norm_estimate: budget components must be positive");

  const SpacePtr& dom = phi.dom();
  CbEstimate best{0.0, level, AmplifiedElement::zero(dom, level)};

  auto ratio = [&](const AmplifiedElement& u) -> double {
    const double nu = amplified_norm(u);
    if (nu <= 1e-300) return -1.0;
    return amplified_norm(phi.amplify(u)) / nu;
  };
  auto consider = [&](const AmplifiedElement& u) {
    const double r = ratio(u);
    if (r > best.value) {
      best.value = r;
      best.witness = u;
    }
  };

  for (const AmplifiedElement& w : injected) {
    require(w.space()->same_as(*dom),
            "cb_norm_estimate: injected witness not in the domain");
    require(w.level() <= level,
            "cb_norm_estimate: injected witness above the requested level");
    consider(corner_embed(w, level));
  }

  const auto dim = dom->dim();
  for (int restart = 0; restart < budget.restarts; ++restart) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(restart)));
    std::vector<CMatrix> coeffs(dim);
    for (auto& c : coeffs) c = rng.gaussian_matrix(level, level);
    AmplifiedElement current(dom, level, coeffs);
    double current_ratio = ratio(current);
    if (current_ratio < 0) continue;
    consider(current);

    double step = 0.5;
    int stale = 0;
    for (int it = 0; it < budget.iterations; ++it) {
      std::vector<CMatrix> proposal(dim);
      for (std::size_t i = 0; i < dim; ++i)
        proposal[i] =
            current.coeff(i) + step * rng.gaussian_matrix(level, level);
      AmplifiedElement candidate(dom, level, std::move(proposal));
      const double r = ratio(candidate);
      if (r > current_ratio) {
        current = std::move(candidate);
        current_ratio = r;
        consider(current);
        stale = 0;
      } else if (++stale >= 8) {
        step *= 0.5;
        stale = 0;
        if (step < 1e-8) break;
      }
    }
  }
  return best;
}

double functional_norm_upper(const OperatorSpace& space,
                             const CVector& covector) {
  require(static_cast<std::size_t>(covector.size()) == space.dim(),
          "functional_norm_upper: covector dimension mismatch");
  // Minimum-Frobenius extension of the functional to the ambient matrix
  // space; its nuclear norm dominates the functional norm, with equality on
  // Hilbertians and full matrix spaces.
  const Eigen::Index cells =
      static_cast<Eigen::Index>(space.in_dim()) * space.out_dim();
  CMatrix a(static_cast<Eigen::Index>(space.dim()), cells);
  for (std::size_t i = 0; i < space.dim(); ++i)
    a.row(static_cast<Eigen::Index>(i)) = vec_as_row(space.basis(i));
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const CVector g = svd.solve(covector);
  CMatrix riesz(space.out_dim(), space.in_dim());
  Eigen::Index c = 0;
  for (int i = 0; i < space.out_dim(); ++i)
    for (int j = 0; j < space.in_dim(); ++j) riesz(i, j) = g(c++);
  return Eigen::JacobiSVD<CMatrix>(riesz).singularValues().sum();
}

}  // namespace opspace
