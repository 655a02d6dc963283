#pragma once

#include <cstdint>
#include <random>

#include "opspace/matrix_core.hpp"

namespace opspace {

/// splitmix64 mix step; derives independent stream seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double gaussian() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

  /// Standard complex Gaussian: independent N(0,1/2) real and imaginary parts.
  Complex gaussian_complex() {
    const double s = 0.7071067811865476;
    return {s * gaussian(), s * gaussian()};
  }

  CMatrix gaussian_matrix(int rows, int cols) {
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = gaussian_complex();
    return m;
  }

  CVector gaussian_vector(int n) {
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = gaussian_complex();
    return v;
  }

  /// Random permutation of {0,…,n−1} (Fisher–Yates).
  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(p[i], p[uniform_int(0, i)]);
    return p;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace opspace
