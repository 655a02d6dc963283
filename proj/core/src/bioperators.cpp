#include "opspace/bioperators.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "opspace/rng.hpp"

namespace opspace {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

bool column_like(SpaceKind k) {
  return k == SpaceKind::column || k == SpaceKind::conjugate_column;
}
bool row_like(SpaceKind k) {
  return k == SpaceKind::row || k == SpaceKind::conjugate_row;
}

}  // namespace

Bioperator::Bioperator(SpacePtr dom_e, SpacePtr dom_f, SpacePtr cod_g,
                       std::vector<Complex> structure)
    : dom_e_(std::move(dom_e)), dom_f_(std::move(dom_f)),
      cod_g_(std::move(cod_g)),
      dim_e_(dom_e_ ? dom_e_->dim() : 0), dim_f_(dom_f_ ? dom_f_->dim() : 0),
      dim_g_(cod_g_ ? cod_g_->dim() : 0), structure_(std::move(structure)) {
  require(dom_e_ != nullptr && dom_f_ != nullptr && cod_g_ != nullptr,
          "Bioperator: null space");
  require(structure_.size() == dim_e_ * dim_f_ * dim_g_,
          "Bioperator: structure tensor does not match the basis dimensions");
}

Bioperator make_inner_product(const SpacePtr& h, const SpacePtr& h_conj) {
  require(h != nullptr && h_conj != nullptr, "make_inner_product: null space");
  require(h->dim() == h_conj->dim(),
          "make_inner_product: dimension mismatch");
  const std::size_t d = h->dim();
  std::vector<Complex> structure(d * d, Complex(0, 0));
  for (std::size_t i = 0; i < d; ++i) structure[i * d + i] = 1.0;
  return Bioperator(h, h_conj, make_scalar_space(), std::move(structure));
}

Bioperator make_functional_product(const SpacePtr& e, const CVector& f,
                                   const SpacePtr& fspace, const CVector& g) {
  require(e != nullptr && fspace != nullptr,
          "make_functional_product: null space");
  require(static_cast<std::size_t>(f.size()) == e->dim() &&
              static_cast<std::size_t>(g.size()) == fspace->dim(),
          "make_functional_product: covector dimension mismatch");
  std::vector<Complex> structure(e->dim() * fspace->dim());
  for (std::size_t i = 0; i < e->dim(); ++i)
    for (std::size_t j = 0; j < fspace->dim(); ++j)
      structure[i * fspace->dim() + j] =
          f(static_cast<Eigen::Index>(i)) * g(static_cast<Eigen::Index>(j));
  return Bioperator(e, fspace, make_scalar_space(), std::move(structure));
}

Bioperator make_scalar_multiplication() {
  const SpacePtr c = make_scalar_space();
  return Bioperator(c, c, c, {Complex(1, 0)});
}

Bioperator make_tensor_bioperator(const SpacePtr& e, const SpacePtr& f) {
  const SpacePtr g = tensor_space(e, f);
  const std::size_t de = e->dim(), df = f->dim();
  std::vector<Complex> structure(de * df * de * df, Complex(0, 0));
  for (std::size_t i = 0; i < de; ++i)
    for (std::size_t j = 0; j < df; ++j)
      structure[(i * df + j) * (de * df) + (i * df + j)] = 1.0;
  return Bioperator(e, f, g, std::move(structure));
}

Bioperator opposite(const Bioperator& r) {
  std::vector<Complex> structure(r.structure().size());
  for (std::size_t j = 0; j < r.dim_f(); ++j)
    for (std::size_t i = 0; i < r.dim_e(); ++i)
      for (std::size_t k = 0; k < r.dim_g(); ++k)
        structure[(j * r.dim_e() + i) * r.dim_g() + k] = r.structure(i, j, k);
  return Bioperator(r.dom_f(), r.dom_e(), r.cod_g(), std::move(structure));
}

namespace {

void check_pair(const Bioperator& r, const AmplifiedElement& u,
                const AmplifiedElement& v) {
  require(u.space()->same_as(*r.dom_e()),
          "bioperator amplification: first argument not in the left domain");
  require(v.space()->same_as(*r.dom_f()),
          "bioperator amplification: second argument not in the right domain");
  require(u.level() == v.level(), "bioperator amplification: level mismatch");
}

}  // namespace

AmplifiedElement strong_amplify(const Bioperator& r, const AmplifiedElement& u,
                                const AmplifiedElement& v) {
  check_pair(r, u, v);
  const int m = u.level();
  std::vector<CMatrix> coeffs(r.dim_g(), CMatrix::Zero(m, m));
  for (std::size_t i = 0; i < r.dim_e(); ++i) {
    if (u.coeff(i).isZero(0.0)) continue;
    for (std::size_t j = 0; j < r.dim_f(); ++j) {
      if (v.coeff(j).isZero(0.0)) continue;
      const CMatrix prod = u.coeff(i) * v.coeff(j);
      for (std::size_t k = 0; k < r.dim_g(); ++k) {
        const Complex c = r.structure(i, j, k);
        if (c != Complex(0, 0)) coeffs[k] += c * prod;
      }
    }
  }
  return AmplifiedElement(r.cod_g(), m, std::move(coeffs));
}

AmplifiedElement weak_amplify(const Bioperator& r, const AmplifiedElement& u,
                              const AmplifiedElement& v,
                              const DiamondContext& ctx) {
  check_pair(r, u, v);
  require(ctx.base_level() == u.level(),
          "weak_amplify: context level must match the elements");
  const int mm = u.level() * u.level();
  std::vector<CMatrix> coeffs(r.dim_g(), CMatrix::Zero(mm, mm));
  for (std::size_t i = 0; i < r.dim_e(); ++i) {
    if (u.coeff(i).isZero(0.0)) continue;
    for (std::size_t j = 0; j < r.dim_f(); ++j) {
      if (v.coeff(j).isZero(0.0)) continue;
      const CMatrix prod = diamond(u.coeff(i), v.coeff(j), ctx);
      for (std::size_t k = 0; k < r.dim_g(); ++k) {
        const Complex c = r.structure(i, j, k);
        if (c != Complex(0, 0)) coeffs[k] += c * prod;
      }
    }
  }
  return AmplifiedElement(r.cod_g(), mm, std::move(coeffs));
}

namespace {

AmplifiedElement diamond_act(const CMatrix& a, const AmplifiedElement& u,
                             const DiamondContext* ctx, bool left) {
  if (ctx != nullptr) {
    require(ctx->base_level() == u.level() && a.rows() == u.level() &&
                a.cols() == u.level(),
            "diamond action: sizes must match the context's base level");
  } else {
    require(a.rows() == a.cols() && a.rows() >= 1,
            "diamond action: operator must be square");
  }
  const Eigen::Index out = a.rows() * u.level();
  std::vector<CMatrix> coeffs(u.coeffs().size(), CMatrix::Zero(out, out));
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const CMatrix& c = u.coeff(i);
    if (ctx != nullptr)
      coeffs[i] = left ? diamond(a, c, *ctx) : diamond(c, a, *ctx);
    else
      coeffs[i] = left ? diamond(a, c) : diamond(c, a);
  }
  return AmplifiedElement(u.space(), static_cast<int>(out), std::move(coeffs));
}

}  // namespace

AmplifiedElement diamond_act_left(const CMatrix& a, const AmplifiedElement& u,
                                  const DiamondContext& ctx) {
  return diamond_act(a, u, &ctx, true);
}
AmplifiedElement diamond_act_left(const CMatrix& a, const AmplifiedElement& u) {
  return diamond_act(a, u, nullptr, true);
}
AmplifiedElement diamond_act_right(const AmplifiedElement& u, const CMatrix& a,
                                   const DiamondContext& ctx) {
  return diamond_act(a, u, &ctx, false);
}
AmplifiedElement diamond_act_right(const AmplifiedElement& u,
                                   const CMatrix& a) {
  return diamond_act(a, u, nullptr, false);
}

namespace {

BioperatorEstimate estimate_bioperator(const Bioperator& r, int level,
                                       const Budget& budget,
                                       std::uint64_t seed,
                                       std::span<const WitnessPair> injected,
                                       bool weak) {
  require(level >= 1, "bioperator estimate: level must be positive");
  require(budget.restarts >= 1 && budget.iterations >= 1,
          "bioperator estimate: budget components must be positive");

  const SpacePtr& e = r.dom_e();
  const SpacePtr& f = r.dom_f();
  BioperatorEstimate best{0.0, level, AmplifiedElement::zero(e, level),
                          AmplifiedElement::zero(f, level)};

  const DiamondContext ctx(level);
  auto output_norm = [&](const AmplifiedElement& u,
                         const AmplifiedElement& v) -> double {
    if (!weak) return amplified_norm(strong_amplify(r, u, v));
    return amplified_norm(weak_amplify(r, u, v, ctx));
  };
  auto ratio = [&](const AmplifiedElement& u,
                   const AmplifiedElement& v) -> double {
    const double nu = amplified_norm(u), nv = amplified_norm(v);
    if (nu <= 1e-300 || nv <= 1e-300) return -1.0;
    return output_norm(u, v) / (nu * nv);
  };
  auto consider = [&](const AmplifiedElement& u, const AmplifiedElement& v) {
    const double value = ratio(u, v);
    if (value > best.value) {
      best.value = value;
      best.witness_u = u;
      best.witness_v = v;
    }
  };

  for (const WitnessPair& pair : injected) {
    require(pair.first.level() == pair.second.level() &&
                pair.first.level() <= level,
            "bioperator estimate: injected pair levels are inconsistent");
    consider(corner_embed(pair.first, level),
             corner_embed(pair.second, level));
  }

  // Basis pairs at level 1 embed into every level, so the estimate always
  // dominates the underlying bioperator norm on the basis.
  for (std::size_t i = 0; i < e->dim(); ++i)
    for (std::size_t j = 0; j < f->dim(); ++j)
      consider(corner_embed(AmplifiedElement::elementary(
                                e, i, CMatrix::Identity(1, 1)),
                            level),
               corner_embed(AmplifiedElement::elementary(
                                f, j, CMatrix::Identity(1, 1)),
                            level));

  for (int restart = 0; restart < budget.restarts; ++restart) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(restart)));
    std::vector<CMatrix> cu(e->dim()), cv(f->dim());
    for (auto& c : cu) c = rng.gaussian_matrix(level, level);
    for (auto& c : cv) c = rng.gaussian_matrix(level, level);
    AmplifiedElement u(e, level, cu);
    AmplifiedElement v(f, level, cv);
    double current = ratio(u, v);
    if (current < 0) continue;
    consider(u, v);

    double step = 0.5;
    int stale = 0;
    for (int it = 0; it < budget.iterations; ++it) {
      std::vector<CMatrix> pu(e->dim()), pv(f->dim());
      for (std::size_t i = 0; i < e->dim(); ++i)
        pu[i] = u.coeff(i) + step * rng.gaussian_matrix(level, level);
      for (std::size_t j = 0; j < f->dim(); ++j)
        pv[j] = v.coeff(j) + step * rng.gaussian_matrix(level, level);
      AmplifiedElement nu(e, level, std::move(pu));
      AmplifiedElement nv(f, level, std::move(pv));
      const double value = ratio(nu, nv);
      if (value > current) {
        u = std::move(nu);
        v = std::move(nv);
        current = value;
        consider(u, v);
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

}  // namespace

BioperatorEstimate estimate_scb(const Bioperator& r, int level,
                                const Budget& budget, std::uint64_t seed,
                                std::span<const WitnessPair> injected) {
  return estimate_bioperator(r, level, budget, seed, injected, /*weak=*/false);
}

BioperatorEstimate estimate_wcb(const Bioperator& r, int level,
                                const Budget& budget, std::uint64_t seed,
                                std::span<const WitnessPair> injected) {
  return estimate_bioperator(r, level, budget, seed, injected, /*weak=*/true);
}

CMatrix compose_bifunctional(const Bioperator& f, const AmplifiedElement& v,
                             const AmplifiedElement& u) {
  require(row_like(f.dom_e()->kind()) && column_like(f.dom_f()->kind()),
          "compose_bifunctional: expects a row × column bifunctional");
  require(f.cod_g()->dim() == 1 && f.cod_g()->in_dim() == 1 &&
              f.cod_g()->out_dim() == 1,
          "compose_bifunctional: codomain must be the scalars");
  require(v.space()->same_as(*f.dom_e()) && u.space()->same_as(*f.dom_f()),
          "compose_bifunctional: arguments not in the domains");
  require(u.level() == v.level(), "compose_bifunctional: level mismatch");

  const auto dh = static_cast<Eigen::Index>(f.dim_e());
  const auto dk = static_cast<Eigen::Index>(f.dim_f());
  CMatrix phi(dh, dk);
  for (Eigen::Index i = 0; i < dh; ++i)
    for (Eigen::Index j = 0; j < dk; ++j)
      phi(i, j) = f.structure(static_cast<std::size_t>(i),
                              static_cast<std::size_t>(j), 0);

  const int m = u.level();
  // v: C^m ⊗ C^dh → C^m,  1⊗φ: C^m ⊗ C^dk → C^m ⊗ C^dh,  u: C^m → C^m ⊗ C^dk
  return v.assembled() * kron(CMatrix::Identity(m, m), phi) * u.assembled();
}

CompressionIdentityReport compression_identity_check(
    const Bioperator& r, const AmplifiedElement& u, const AmplifiedElement& v,
    const CMatrix& p, const DiamondContext& ctx) {
  require(u.level() == v.level() && ctx.base_level() == u.level(),
          "compression_identity_check: level mismatch");
  require(p.rows() == u.level() && p.cols() == u.level(),
          "compression_identity_check: projection must match the level");

  const CMatrix id = CMatrix::Identity(u.level(), u.level());
  const AmplifiedElement weak_side = weak_amplify(
      r, module_action(id, u, p), module_action(p, v, id), ctx);
  const AmplifiedElement strong_side = strong_amplify(
      r, diamond_act_right(u, p, ctx), diamond_act_left(p, v, ctx));

  CompressionIdentityReport report;
  report.weak_norm = amplified_norm(weak_side);
  report.strong_norm = amplified_norm(strong_side);
  double dev = 0, scale = 0;
  for (std::size_t k = 0; k < weak_side.coeffs().size(); ++k) {
    dev = std::max(dev,
                   (weak_side.coeff(k) - strong_side.coeff(k)).cwiseAbs()
                       .maxCoeff());
    scale = std::max(scale, weak_side.coeff(k).cwiseAbs().maxCoeff());
  }
  report.deviation = dev;
  report.passed = dev <= 1e-12 * std::max(1.0, scale);
  return report;
}

}  // namespace opspace
