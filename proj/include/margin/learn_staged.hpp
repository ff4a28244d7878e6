#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "margin/cover.hpp"
#include "margin/error.hpp"
#include "margin/spectral.hpp"
#include "margin/types.hpp"

namespace margin {

namespace detail {

inline std::uint64_t fnv1a(const double* data, size_t n) {
  std::uint64_t h = 1469598103934665603ull;
  const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

// Flat first-seen-ordered store of candidate weight vectors with exact
// byte-level dedup.
struct CandidateStore {
  int dim;
  std::vector<double> flat;   // unique candidates, dim doubles each
  std::vector<double> norms;  // Euclidean norm per unique candidate
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> index;

  explicit CandidateStore(int d) : dim(d) {}
  std::uint32_t count() const { return static_cast<std::uint32_t>(norms.size()); }
  const double* at(std::uint32_t i) const { return flat.data() + static_cast<size_t>(i) * dim; }

  void insert(const Vector& w) {
    std::uint64_t h = fnv1a(w.data(), static_cast<size_t>(dim));
    auto& bucket = index[h];
    for (std::uint32_t i : bucket)
      if (std::memcmp(at(i), w.data(), sizeof(double) * dim) == 0) return;
    bucket.push_back(count());
    flat.insert(flat.end(), w.data(), w.data() + dim);
    norms.push_back(w.norm());
  }
};

}  // namespace detail

// Staged spectral learner. Guess sequences k^(0..s-1) of positive integers
// (each <= d, total <= floor(8/(delta*gamma^2)) + 2) are walked in ascending
// total order, ties broken lexicographically, via iterative deepening so a
// budget cut keeps every shorter sequence complete. At each stage the data is
// conditioned on y<w,x> <= gamma/2, and the next correction is a ball-net
// point of the top-k eigenspace of the conditioned second moment at
// resolution delta*gamma^3. Every intermediate w is a candidate; the output
// is the gamma/2-margin argmin over unit-clipped candidates.
inline LearnReport learn_staged(const WeightedDataset& D, const LearnParams& p) {
  require_valid(D);
  if (!(p.gamma > 0.0 && p.gamma < 1.0)) throw std::invalid_argument("learn_staged: gamma");
  if (!(p.delta_slack > 0.0 && p.delta_slack <= 1.0))
    throw std::invalid_argument("learn_staged: delta_slack must be in (0,1]");
  auto t0 = std::chrono::steady_clock::now();

  const double gamma = p.gamma;
  const double delta = p.delta_slack;
  const int kmax_sum = static_cast<int>(std::floor(8.0 / (delta * gamma * gamma))) + 2;
  const double res = delta * gamma * gamma * gamma;
  const double cond_thr = gamma / 2.0;
  const int d = D.dim;

  Matrix Xy = D.y.asDiagonal() * D.X;  // row i is y_i * x_i

  detail::CandidateStore store(d);
  std::uint64_t recorded = 0;
  bool truncated = false;
  std::uint64_t recorded_this_round = 0;

  auto record = [&](const Vector& w) -> bool {
    if (recorded >= p.budget_cap) {
      truncated = true;
      return false;
    }
    ++recorded;
    ++recorded_this_round;
    store.insert(w);
    return true;
  };

  // Children of the node at w share one conditioned eigendecomposition.
  // Returns false when the walk must stop (budget exhausted).
  std::function<bool(const Vector&, int, int)> expand =
      [&](const Vector& w, int sum, int target) -> bool {
    Vector ym = Xy * w;
    double mass = 0.0;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < ym.size(); ++i)
      if (ym[i] <= cond_thr) {
        keep.push_back(i);
        mass += D.p[i];
      }
    if (!(mass > 0.0)) return true;  // branch terminates; w itself is already recorded

    Matrix Xs(static_cast<Eigen::Index>(keep.size()), d);
    Vector ps(static_cast<Eigen::Index>(keep.size()));
    for (size_t j = 0; j < keep.size(); ++j) {
      Xs.row(static_cast<Eigen::Index>(j)) = D.X.row(keep[j]);
      ps[static_cast<Eigen::Index>(j)] = D.p[keep[j]] / mass;
    }
    Matrix M = Xs.transpose() * ps.asDiagonal() * Xs;
    M = ((M + M.transpose()) * 0.5).eval();
    EigenDecomposition E = eigendecompose(SecondMomentMatrix{std::move(M)});

    int kcap = std::min(d, target - sum);
    Vector child(d);
    for (int k = 1; k <= kcap; ++k) {
      auto B = E.eigenvectors.leftCols(k);
      bool is_leaf = (sum + k == target);
      bool ok = for_each_cover_point_coords(k, res, Region::ball, [&](const Vector& c) {
        child = w + B * c;
        if (is_leaf) return record(child);
        return expand(child, sum + k, target);
      });
      if (!ok) return false;
    }
    return true;
  };

  Vector w0 = Vector::Zero(d);
  record(w0);
  int rounds_completed = 0;
  for (int target = 1; target <= kmax_sum && !truncated; ++target) {
    recorded_this_round = 0;
    if (!expand(w0, 0, target)) break;
    rounds_completed = target;
    if (recorded_this_round == 0) break;  // every branch already terminated
  }

  // Final argmin of margin_error(D, w/max(1,|w|), gamma/2) over unique
  // candidates; the clip is folded into a per-candidate threshold.
  const std::uint32_t n_unique = store.count();
  std::uint32_t best_idx = 0;
  double best_err = 2.0;
  const Eigen::Index chunk = 8192;
  Matrix W(d, chunk);
  std::uint32_t base = 0;
  while (base < n_unique) {
    Eigen::Index fill = static_cast<Eigen::Index>(
        std::min<std::uint32_t>(chunk, n_unique - base));
    for (Eigen::Index j = 0; j < fill; ++j)
      W.col(j) = Eigen::Map<const Vector>(store.at(base + static_cast<std::uint32_t>(j)), d);
    Matrix margins = Xy * W.leftCols(fill);
    for (Eigen::Index j = 0; j < fill; ++j) {
      double thr = cond_thr * std::max(1.0, store.norms[base + static_cast<std::uint32_t>(j)]);
      double e = 0.0;
      for (Eigen::Index i = 0; i < margins.rows(); ++i)
        if (margins(i, j) <= thr) e += D.p[i];
      if (e < best_err) {
        best_err = e;
        best_idx = base + static_cast<std::uint32_t>(j);
      }
    }
    base += static_cast<std::uint32_t>(fill);
  }

  Vector w_best = Eigen::Map<const Vector>(store.at(best_idx), d);
  w_best /= std::max(1.0, store.norms[best_idx]);

  LearnReport r;
  r.hypothesis.w = w_best;
  r.train_zero_one = zero_one_error(D, r.hypothesis);
  r.train_margin_errors = margin_error_grid(D, w_best, gamma);
  r.candidates_examined = recorded;
  r.seed = p.seed;
  r.truncated = truncated;
  if (truncated) {
    r.flags.push_back("enumeration_budget_exceeded");
    r.size_estimate = static_cast<double>(recorded);  // exact count is unknowable cheaply
  }
  r.extras["kmax_sum"] = kmax_sum;
  r.extras["cover_resolution"] = res;
  r.extras["unique_candidates"] = n_unique;
  r.extras["rounds_completed"] = rounds_completed;
  r.extras["best_margin_g2"] = best_err;
  r.wallclock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return r;
}

}  // namespace margin
