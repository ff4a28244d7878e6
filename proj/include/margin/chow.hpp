#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "margin/cover.hpp"
#include "margin/error.hpp"
#include "margin/jl.hpp"
#include "margin/spectral.hpp"
#include "margin/types.hpp"

namespace margin {

struct ChowVector {
  Vector c;
};

// E[h(x) x] under the dataset marginal, sign(0) = +1.
inline ChowVector chow_vector(const WeightedDataset& D, const Halfspace& h) {
  if (h.w.size() != D.dim) throw std::invalid_argument("chow_vector: dimension mismatch");
  Vector dots = D.X * h.w;
  Vector coef(dots.size());
  for (Eigen::Index i = 0; i < dots.size(); ++i)
    coef[i] = D.p[i] * static_cast<double>(sign_pm1(dots[i]));
  return {Vector(D.X.transpose() * coef)};
}

// E[y x], the label-weighted mean of the support.
inline ChowVector empirical_chow(const WeightedDataset& D) {
  require_valid(D);
  return {Vector(D.X.transpose() * D.p.cwiseProduct(D.y))};
}

// Fixed-step residual iteration with ball clipping: w <- clip(w + (c -
// Chow(h_w))). Returns the iterate (including w^0 = c) whose realized Chow
// vector is closest to c; earliest iterate wins ties.
inline Halfspace chow_to_halfspace(const WeightedDataset& D, const ChowVector& c,
                                   int rounds = 200) {
  if (c.c.size() != D.dim) throw std::invalid_argument("chow_to_halfspace: dimension mismatch");
  if (!(c.c.norm() <= 1.0 + 1e-9))
    throw std::invalid_argument("chow_to_halfspace: |c| must be <= 1");
  Vector w = c.c;
  Vector best_w = w;
  double best_res = (c.c - chow_vector(D, Halfspace{w}).c).norm();
  for (int t = 0; t < rounds; ++t) {
    Vector g = chow_vector(D, Halfspace{w}).c;
    w = clip_ball(w + (c.c - g));
    double res = (c.c - chow_vector(D, Halfspace{w}).c).norm();
    if (res < best_res) {
      best_res = res;
      best_w = w;
    }
  }
  return Halfspace{best_w};
}

namespace detail {

// Next size-j index combination in lexicographic order; false when exhausted.
inline bool next_combination(std::vector<int>& comb, int n) {
  int j = static_cast<int>(comb.size());
  for (int i = j - 1; i >= 0; --i) {
    if (comb[static_cast<size_t>(i)] < n - (j - i)) {
      ++comb[static_cast<size_t>(i)];
      for (int t = i + 1; t < j; ++t)
        comb[static_cast<size_t>(t)] = comb[static_cast<size_t>(t - 1)] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Guess-based Chow learner. Depth m = ceil(ln(1/(alpha*gamma)) /
// (alpha*gamma)^2). Guessed correction subspaces are spans of support-point
// subsets of size <= m (a sequence's span depends only on its set, so sets
// are enumerated once, ascending size then lexicographic, after dropping
// bit-identical support duplicates). For each ball-net point g of the
// subspace at resolution alpha*gamma*opt_guess, the in-span part of P = E[yx]
// is replaced by g and the result (clipped to the unit ball) is handed to
// chow_to_halfspace. Output: the candidate with least zero-one error.
inline LearnReport learn_chow_explicit(const WeightedDataset& D, const LearnParams& p,
                                       double opt_guess) {
  require_valid(D);
  if (!(opt_guess > 0.0 && opt_guess <= 0.5))
    throw std::invalid_argument("learn_chow_explicit: opt_guess must be in (0, 1/2]");
  double ag = p.alpha * p.gamma;
  if (!(p.gamma > 0.0 && p.alpha >= 1.0 && ag < 1.0))
    throw std::invalid_argument("learn_chow_explicit: need alpha >= 1, gamma > 0, alpha*gamma < 1");
  auto t0 = std::chrono::steady_clock::now();

  const int m_depth = static_cast<int>(std::ceil(std::log(1.0 / ag) / (ag * ag)));
  const double cover_res = ag * opt_guess;
  Vector P = empirical_chow(D).c;

  // Unique support points, first occurrence order.
  std::vector<int> uniq;
  for (Eigen::Index i = 0; i < D.size(); ++i) {
    bool dup = false;
    for (int u : uniq)
      if (D.X.row(u).cwiseEqual(D.X.row(i)).all()) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back(static_cast<int>(i));
  }
  const int n_uniq = static_cast<int>(uniq.size());
  const int jmax = std::min(m_depth, n_uniq);

  double subset_count = 0.0;
  for (int j = 0; j <= jmax; ++j) {
    double c = 1.0;
    for (int t = 0; t < j; ++t) c *= static_cast<double>(n_uniq - t) / (t + 1);
    subset_count += c;
  }

  LearnReport r;
  r.seed = p.seed;
  r.extras["m_guess_depth"] = m_depth;
  r.extras["subset_count"] = subset_count;
  r.size_estimate = subset_count;

  std::uint64_t examined = 0;
  bool truncated = false;
  double best_err = 2.0;
  Halfspace best_h{Vector::Zero(D.dim)};

  auto try_candidate = [&](const Vector& p_prime) -> bool {
    if (examined >= p.budget_cap) {
      truncated = true;
      return false;
    }
    ++examined;
    Halfspace h = chow_to_halfspace(D, ChowVector{clip_ball(p_prime)}, 200);
    double e = zero_one_error(D, h);
    if (e < best_err) {
      best_err = e;
      best_h = h;
    }
    return best_err > 0.0;  // a perfect candidate cannot be improved on
  };

  bool stop = false;
  for (int j = 0; j <= jmax && !stop && !truncated; ++j) {
    if (j == 0) {
      // Empty guess set: V = {0}, the correction leaves P as is.
      stop = !try_candidate(P);
      continue;
    }
    std::vector<int> comb(static_cast<size_t>(j));
    for (int t = 0; t < j; ++t) comb[static_cast<size_t>(t)] = t;
    do {
      std::vector<Vector> pts;
      pts.reserve(static_cast<size_t>(j));
      for (int t : comb) pts.emplace_back(D.X.row(uniq[static_cast<size_t>(t)]).transpose());
      SubspaceBasis V = gram_schmidt_basis(pts, D.dim, 1e-9);
      if (V.dim_v == 0) continue;
      Vector P_out = P - project(P, V);
      bool ok = for_each_cover_point_coords(V.dim_v, cover_res, Region::ball,
                                            [&](const Vector& cc) {
                                              return try_candidate(P_out + V.B * cc);
                                            });
      if (!ok) stop = true;
    } while (!stop && !truncated && detail::next_combination(comb, n_uniq));
  }

  r.hypothesis = best_h;
  r.train_zero_one = best_err;
  r.train_margin_errors = margin_error_grid(D, best_h.w, p.gamma);
  r.candidates_examined = examined;
  r.truncated = truncated;
  if (truncated) r.flags.push_back("guess_budget_exceeded");
  r.extras["best_zero_one"] = best_err;
  r.wallclock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return r;
}

// Dimension-reduced wrapper: project the data through a normalized JL map,
// run the guess learner at margin gamma/2 over a geometric opt_guess grid,
// lift each hypothesis back by A^T, and keep the best by zero-one error on
// the original data. The JL draw is retried with seed+1 (up to 5 attempts)
// when no guess satisfies err <= alpha*guess + epsilon on the training set.
inline LearnReport learn_alpha(const WeightedDataset& D, const LearnParams& p) {
  require_valid(D);
  double ag = p.alpha * p.gamma;
  if (!(p.gamma > 0.0 && p.gamma < 1.0 && p.alpha >= 1.0 && ag < 1.0))
    throw std::invalid_argument("learn_alpha: need alpha >= 1, gamma in (0,1), alpha*gamma < 1");
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) throw std::invalid_argument("learn_alpha: epsilon");
  auto t0 = std::chrono::steady_clock::now();

  const int m_jl = static_cast<int>(std::ceil(8.0 * std::log(p.alpha / p.epsilon) /
                                              (p.gamma * p.gamma)));
  std::vector<double> guesses;
  for (double g = p.epsilon / p.alpha; g < 0.5; g *= 2.0) guesses.push_back(g);
  guesses.push_back(0.5);

  LearnReport r;
  r.seed = p.seed;
  r.extras["m_jl"] = m_jl;
  r.extras["m_guess_depth"] =
      std::ceil(std::log(1.0 / ag) / (ag * ag));  // depth formula at the caller's margin
  double ag_inner = p.alpha * (p.gamma / 2.0);
  r.extras["m_guess_depth_inner"] = std::ceil(std::log(1.0 / ag_inner) / (ag_inner * ag_inner));

  double best_err = 2.0;
  Vector best_w = Vector::Zero(D.dim);
  std::uint64_t examined = 0;
  bool truncated = false;
  bool zero_flagged = false;
  bool contract_met = false;
  int attempts = 0;

  for (int attempt = 0; attempt < 5; ++attempt) {
    attempts = attempt + 1;
    JlProjection A = sample_jl(D.dim, m_jl, p.seed + static_cast<std::uint64_t>(attempt));
    WeightedDataset DA;
    DA.dim = m_jl;
    DA.X.resize(D.size(), m_jl);
    DA.y = D.y;
    DA.p = D.p;
    for (Eigen::Index i = 0; i < D.size(); ++i) {
      bool z = false;
      DA.X.row(i) = jl_transform(A, D.x(i), &z).transpose();
      zero_flagged = zero_flagged || z;
    }

    double attempt_best_slack = 2.0;
    double attempt_best_err = 2.0;
    Vector attempt_best_w = Vector::Zero(D.dim);
    for (double guess : guesses) {
      LearnParams pi = p;
      pi.gamma = p.gamma / 2.0;
      pi.seed = p.seed + static_cast<std::uint64_t>(attempt);
      LearnReport inner = learn_chow_explicit(DA, pi, guess);
      examined += inner.candidates_examined;
      truncated = truncated || inner.truncated;
      Vector lift = A.A.transpose() * inner.hypothesis.w;
      double n = lift.norm();
      Halfspace h{n > 0.0 ? Vector(lift / n) : Vector::Zero(D.dim)};
      double e = zero_one_error(D, h);
      if (e < attempt_best_err) {
        attempt_best_err = e;
        attempt_best_w = h.w;
      }
      attempt_best_slack = std::min(attempt_best_slack, e - p.alpha * guess);
      if (e == 0.0) break;
    }
    if (attempt_best_err < best_err) {
      best_err = attempt_best_err;
      best_w = attempt_best_w;
    }
    if (attempt_best_slack <= p.epsilon) {
      contract_met = true;
      break;
    }
    r.flags.push_back("jl_resample");
  }
  if (!contract_met) r.flags.push_back("jl_retries_exhausted");
  if (zero_flagged) r.flags.push_back("jl_zero_vector");

  r.hypothesis.w = best_w;
  r.train_zero_one = best_err;
  r.train_margin_errors = margin_error_grid(D, best_w, p.gamma);
  r.candidates_examined = examined;
  r.truncated = truncated;
  if (truncated) r.flags.push_back("guess_budget_exceeded");
  r.extras["jl_attempts"] = attempts;
  r.wallclock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return r;
}

}  // namespace margin
