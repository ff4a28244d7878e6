#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

#include "margin/types.hpp"

namespace margin {

struct JlProjection {
  Matrix A;  // target_dim x d, entries +-1/sqrt(target_dim)
  int target_dim = 0;
  std::uint64_t seed = 0;
};

// Rademacher sign matrix scaled by 1/sqrt(m). Entries drawn row-major from a
// seeded mt19937_64, one bit per entry, so the matrix is a pure function of
// (d, m, seed).
inline JlProjection sample_jl(int d, int m, std::uint64_t seed) {
  if (d < 1 || m < 1) throw std::invalid_argument("sample_jl: dimensions must be >= 1");
  JlProjection P;
  P.target_dim = m;
  P.seed = seed;
  P.A.resize(m, d);
  std::mt19937_64 rng(seed);
  double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j)
      P.A(i, j) = (rng() & 1ull) ? scale : -scale;
  return P;
}

// Normalized projection h_A(x) = Ax/|Ax|. Ax = 0 maps to the zero vector and
// raises *zeroed when provided.
inline Vector jl_transform(const JlProjection& P, const Vector& x, bool* zeroed = nullptr) {
  if (x.size() != P.A.cols()) throw std::invalid_argument("jl_transform: dimension mismatch");
  Vector v = P.A * x;
  double n = v.norm();
  if (n == 0.0) {
    if (zeroed) *zeroed = true;
    return Vector::Zero(P.target_dim);
  }
  return v / n;
}

}  // namespace margin
