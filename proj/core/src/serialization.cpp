#include "opspace/serialization.hpp"

#include <stdexcept>

namespace opspace {

Json to_json(const CMatrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> re, im;
  re.reserve(m.size());
  im.reserve(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(i, c).real());
      im.push_back(m(i, c).imag());
    }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

CMatrix cmatrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (rows < 0 || cols < 0 ||
      static_cast<Eigen::Index>(re.size()) != rows * cols ||
      static_cast<Eigen::Index>(im.size()) != rows * cols)
    throw std::invalid_argument("cmatrix_from_json: inconsistent shape");
  CMatrix m(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c, ++k)
      m(i, c) = Complex(re[k].get<double>(), im[k].get<double>());
  return m;
}

Json to_json(const OperatorSpace& space) {
  Json j;
  j["kind"] = to_string(space.kind());
  j["in_dim"] = space.in_dim();
  j["out_dim"] = space.out_dim();
  Json basis = Json::array();
  for (std::size_t i = 0; i < space.dim(); ++i)
    basis.push_back(to_json(space.basis(i)));
  j["basis"] = std::move(basis);
  return j;
}

SpacePtr space_from_json(const Json& j) {
  const SpaceKind kind = space_kind_from_string(j.at("kind").get<std::string>());
  const int in_dim = j.at("in_dim").get<int>();
  const int out_dim = j.at("out_dim").get<int>();
  std::vector<CMatrix> basis;
  for (const Json& b : j.at("basis")) basis.push_back(cmatrix_from_json(b));
  return std::make_shared<OperatorSpace>(kind, in_dim, out_dim,
                                         std::move(basis));
}

Json to_json(const AmplifiedElement& u) {
  Json j;
  j["space"] = to_json(*u.space());
  j["level"] = u.level();
  Json coeffs = Json::array();
  for (const CMatrix& c : u.coeffs()) coeffs.push_back(to_json(c));
  j["coeffs"] = std::move(coeffs);
  return j;
}

AmplifiedElement element_from_json(const Json& j,
                                   const SpaceRegistry& registry) {
  SpacePtr space;
  const Json& sj = j.at("space");
  if (sj.is_string()) {
    const auto it = registry.find(sj.get<std::string>());
    if (it == registry.end())
      throw std::invalid_argument("element_from_json: unknown space ref " +
                                  sj.get<std::string>());
    space = it->second;
  } else {
    space = space_from_json(sj);
  }
  const int level = j.at("level").get<int>();
  std::vector<CMatrix> coeffs;
  for (const Json& c : j.at("coeffs")) coeffs.push_back(cmatrix_from_json(c));
  return AmplifiedElement(std::move(space), level, std::move(coeffs));
}

Json to_json(const Bioperator& r) {
  Json j;
  j["dom_E"] = to_json(*r.dom_e());
  j["dom_F"] = to_json(*r.dom_f());
  j["cod_G"] = to_json(*r.cod_g());
  Json structure = Json::array();
  for (std::size_t i = 0; i < r.dim_e(); ++i) {
    Json ji = Json::array();
    for (std::size_t jj = 0; jj < r.dim_f(); ++jj) {
      Json jk = Json::array();
      for (std::size_t k = 0; k < r.dim_g(); ++k) {
        const Complex c = r.structure(i, jj, k);
        jk.push_back(Json::array({c.real(), c.imag()}));
      }
      ji.push_back(std::move(jk));
    }
    structure.push_back(std::move(ji));
  }
  j["structure"] = std::move(structure);
  return j;
}

Bioperator bioperator_from_json(const Json& j) {
  SpacePtr e = space_from_json(j.at("dom_E"));
  SpacePtr f = space_from_json(j.at("dom_F"));
  SpacePtr g = space_from_json(j.at("cod_G"));
  const Json& s = j.at("structure");
  std::vector<Complex> structure;
  structure.reserve(e->dim() * f->dim() * g->dim());
  if (s.size() != e->dim())
    throw std::invalid_argument("bioperator_from_json: bad structure shape");
  for (const Json& ji : s) {
    if (ji.size() != f->dim())
      throw std::invalid_argument("bioperator_from_json: bad structure shape");
    for (const Json& jk : ji) {
      if (jk.size() != g->dim())
        throw std::invalid_argument(
            "bioperator_from_json: bad structure shape");
      for (const Json& c : jk)
        structure.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    }
  }
  return Bioperator(std::move(e), std::move(f), std::move(g),
                    std::move(structure));
}

Json to_json(const BioperatorEstimate& e) {
  Json j;
  j["level"] = e.level;
  j["value"] = e.value;
  j["witness_u"] = to_json(e.witness_u);
  j["witness_v"] = to_json(e.witness_v);
  return j;
}

Json to_json(const NormBracket& b) {
  Json j;
  j["lower"] = b.lower;
  j["upper"] = b.upper;
  j["gap"] = b.gap();
  j["lower_method"] = to_string(b.lower_method);
  j["upper_method"] = to_string(b.upper_method);
  return j;
}

Json to_json(const EqualityReport& r) {
  Json j;
  j["case"] = to_string(r.case_tag);
  j["seed"] = r.seed;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  j["gap"] = r.upper - r.lower;
  j["gap_rel"] = r.gap_rel;
  j["lower_method"] = to_string(r.lower_method);
  j["upper_method"] = to_string(r.upper_method);
  j["resolved"] = r.resolved;
  j["detail"] = r.detail;
  return j;
}

}  // namespace opspace
