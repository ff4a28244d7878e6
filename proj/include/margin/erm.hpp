#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "margin/cover.hpp"
#include "margin/error.hpp"
#include "margin/spectral.hpp"
#include "margin/types.hpp"

namespace margin {

// Orthonormal basis of the span of the support points.
inline SubspaceBasis span_of_support(const WeightedDataset& D, double rank_tol = 1e-7) {
  std::vector<Vector> rows;
  rows.reserve(static_cast<size_t>(D.size()));
  for (Eigen::Index i = 0; i < D.size(); ++i) rows.emplace_back(D.X.row(i).transpose());
  return gram_schmidt_basis(rows, D.dim, rank_tol);
}

// Dense sphere-net minimizer of margin error at threshold gamma - resolution
// over the span of the support. The shrunken threshold absorbs the net
// granularity, so the returned value never exceeds OPT_gamma: for any w, its
// normalized in-span projection only scales margins up, and a net point
// within `resolution` of it moves each margin by at most `resolution`.
inline std::pair<Halfspace, double> brute_force_erm(const WeightedDataset& D, double gamma,
                                                    double resolution) {
  require_valid(D);
  if (!(resolution > 0.0)) throw std::invalid_argument("brute_force_erm: resolution must be > 0");
  SubspaceBasis B = span_of_support(D);
  if (B.dim_v > 4)
    throw std::invalid_argument("brute_force_erm: support spans dimension > 4");
  double thr = std::max(0.0, gamma - resolution);
  if (B.dim_v == 0) {
    // All-zero support: every margin is 0 <= thr, any w gives full error mass.
    return {Halfspace{Vector::Zero(D.dim)}, 1.0};
  }

  Matrix Xb = D.X * B.B;  // m x dim_v, margins depend on basis coords only
  const Eigen::Index chunk = 4096;
  Matrix C(B.dim_v, chunk);
  Eigen::Index fill = 0;
  double best = 2.0;
  Vector best_c;
  auto flush = [&]() {
    if (fill == 0) return;
    Matrix margins = D.y.asDiagonal() * (Xb * C.leftCols(fill));
    for (Eigen::Index j = 0; j < fill; ++j) {
      double e = 0.0;
      for (Eigen::Index i = 0; i < margins.rows(); ++i)
        if (margins(i, j) <= thr) e += D.p[i];
      if (e < best) {
        best = e;
        best_c = C.col(j);
      }
    }
    fill = 0;
  };
  for_each_cover_point_coords(B.dim_v, resolution, Region::sphere, [&](const Vector& c) {
    C.col(fill++) = c;
    if (fill == chunk) flush();
    return true;
  });
  flush();
  return {Halfspace{Vector(B.B * best_c)}, best};
}

}  // namespace margin
