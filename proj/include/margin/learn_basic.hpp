#pragma once

#include <chrono>
#include <stdexcept>

#include "margin/cover.hpp"
#include "margin/error.hpp"
#include "margin/spectral.hpp"
#include "margin/types.hpp"

namespace margin {

// Spectral-projection learner: restrict to the eigenspace of the second
// moment with eigenvalues >= delta = eps*gamma^2/16, enumerate a sphere net
// of that subspace at resolution delta/2, and return the net point with the
// least gamma/4-margin error. Enumeration past budget_cap truncates the net
// and flags the report.
inline LearnReport learn_basic(const WeightedDataset& D, const LearnParams& p) {
  require_valid(D);
  if (!(p.gamma > 0.0 && p.gamma < 1.0)) throw std::invalid_argument("learn_basic: gamma");
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) throw std::invalid_argument("learn_basic: epsilon");
  auto t0 = std::chrono::steady_clock::now();

  double delta = p.epsilon * p.gamma * p.gamma / 16.0;
  SecondMomentMatrix M = second_moment(D);
  EigenDecomposition E = eigendecompose(M);
  SubspaceBasis V = eigenspace_above(E, delta);

  LearnReport r;
  r.seed = p.seed;
  r.extras["delta"] = delta;
  r.extras["dim_v"] = V.dim_v;

  if (V.dim_v == 0) {
    r.hypothesis.w = Vector::Zero(D.dim);
    r.flags.push_back("degenerate_eigenspace");
    r.train_zero_one = zero_one_error(D, r.hypothesis);
    r.train_margin_errors = margin_error_grid(D, r.hypothesis.w, p.gamma);
    r.wallclock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return r;
  }

  double res = delta / 2.0;
  double est = estimate_cover_size(V.dim_v, res, Region::sphere);
  r.size_estimate = est;
  r.extras["cover_size_estimate"] = est;

  double thr = p.gamma / 4.0;
  Matrix Xb = D.X * V.B;  // margins of in-span unit vectors need basis coords only
  const Eigen::Index chunk = 4096;
  Matrix C(V.dim_v, chunk);
  Eigen::Index fill = 0;
  std::uint64_t seen = 0;
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
  bool completed = for_each_cover_point_coords(
      V.dim_v, res, Region::sphere, [&](const Vector& c) {
        if (seen >= p.budget_cap) return false;
        ++seen;
        C.col(fill++) = c;
        if (fill == chunk) flush();
        return true;
      });
  flush();
  r.truncated = !completed;
  if (r.truncated) r.flags.push_back("cover_budget_exceeded");
  r.candidates_examined = seen;

  r.hypothesis.w = (best_c.size() > 0) ? Vector(V.B * best_c) : Vector::Zero(D.dim);
  r.train_zero_one = zero_one_error(D, r.hypothesis);
  r.train_margin_errors = margin_error_grid(D, r.hypothesis.w, p.gamma);
  r.extras["best_cover_error_g4"] = best;
  r.wallclock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return r;
}

}  // namespace margin
