#pragma once

#include <cmath>

#include "opspace/matrix_core.hpp"

namespace opspace::test {

/// Independent largest-singular-value oracle: power iteration on M^*·M with a
/// deterministic start vector, finished with a Rayleigh quotient. Kept free of
/// any SVD so it can check the production norm path.
inline double power_iteration_norm(const CMatrix& m, int iterations = 4000) {
  const CMatrix gram = m.adjoint() * m;
  const Eigen::Index n = gram.rows();
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = Complex(1.0 + 0.01 * static_cast<double>(i),
                   0.5 - 0.003 * static_cast<double>(i));
  v /= v.norm();
  for (int it = 0; it < iterations; ++it) {
    CVector w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
  }
  const Complex rayleigh = (v.adjoint() * (gram * v))(0, 0);
  return std::sqrt(std::max(0.0, rayleigh.real()));
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace opspace::test
