#pragma once

// Exact rational linear-program feasibility (phase-1 simplex, Bland's rule)
// and an exhaustive zero-one-optimum oracle built on top of it.
//
// The oracle decides "is there a halfspace whose weighted misclassification
// mass is at most theta" for a small exact dataset: it enumerates candidate
// error sets T of mass <= theta and asks, in exact arithmetic, whether some w
// classifies every remaining sample correctly. Correct classification uses
// the sign(0) = +1 convention: a kept +1 sample needs <c, w> >= 0, a kept -1
// sample needs <c, w> < 0 (encoded homogeneously as <c, w> <= -1).

#include "margin/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace margin {

// Feasibility of { x in R^d (free) : A x >= b }, decided exactly.
inline bool rational_lp_feasible(const std::vector<std::vector<Rat>>& A,
                                 const std::vector<Rat>& b) {
  const std::size_t m = A.size();
  if (m != b.size()) throw std::invalid_argument("rational_lp_feasible: shape mismatch");
  if (m == 0) return true;
  const std::size_t d = A[0].size();
  for (const auto& row : A)
    if (row.size() != d) throw std::invalid_argument("rational_lp_feasible: ragged rows");

  // Columns: x+ (d), x- (d), surplus (m), artificial (m).
  const std::size_t nv = 2 * d + 2 * m;
  std::vector<std::vector<Rat>> tab(m, std::vector<Rat>(nv + 1));
  for (std::size_t i = 0; i < m; ++i) {
    const bool neg = b[i] < 0;
    const Rat sgn = neg ? Rat(-1) : Rat(1);
    for (std::size_t j = 0; j < d; ++j) {
      tab[i][j] = sgn * A[i][j];
      tab[i][d + j] = -sgn * A[i][j];
    }
    tab[i][2 * d + i] = -sgn;       // surplus: A x - s = b
    tab[i][2 * d + m + i] = Rat(1); // artificial
    tab[i][nv] = sgn * b[i];
  }

  // Phase-1 objective: minimize sum of artificials. z[j] = c_B B^{-1} A_j - c_j.
  std::vector<Rat> z(nv + 1);
  for (std::size_t j = 0; j <= nv; ++j) {
    Rat acc = 0;
    for (std::size_t i = 0; i < m; ++i) acc += tab[i][j];
    z[j] = acc;
  }
  for (std::size_t i = 0; i < m; ++i) z[2 * d + m + i] -= 1;

  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = 2 * d + m + i;

  const std::size_t max_iters = 8000 + 200 * m * (nv + 1);
  for (std::size_t iter = 0;; ++iter) {
    if (iter > max_iters) throw std::runtime_error("rational_lp_feasible: iteration cap hit");
    // Bland entering rule: lowest-index improving column.
    std::size_t enter = nv;
    for (std::size_t j = 0; j < nv; ++j)
      if (z[j] > 0) { enter = j; break; }
    if (enter == nv) break;  // optimal

    // Ratio test; Bland tie-break on smallest basic variable index.
    std::size_t leave = m;
    Rat best_ratio = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (tab[i][enter] <= 0) continue;
      Rat ratio = tab[i][nv] / tab[i][enter];
      if (leave == m || ratio < best_ratio ||
          (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == m)
      throw std::runtime_error("rational_lp_feasible: unbounded phase-1 (should not happen)");

    // Pivot.
    const Rat piv = tab[leave][enter];
    for (std::size_t j = 0; j <= nv; ++j) tab[leave][j] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || tab[i][enter] == 0) continue;
      const Rat f = tab[i][enter];
      for (std::size_t j = 0; j <= nv; ++j) tab[i][j] -= f * tab[leave][j];
    }
    if (z[enter] != 0) {
      const Rat f = z[enter];
      for (std::size_t j = 0; j <= nv; ++j) z[j] -= f * tab[leave][j];
    }
    basis[leave] = enter;
  }
  return z[nv] == 0;
}

// One exact sample: coordinates (up to an arbitrary positive per-sample
// scale, which does not affect classification), its label, and its
// probability mass.
struct ExactSample {
  std::vector<Rat> coeffs;
  int label = 1;  // +1 or -1
  Rat mass;
};

// Can some halfspace classify every sample outside `dropped` correctly?
inline bool exact_pattern_realizable(const std::vector<ExactSample>& samples,
                                     const std::vector<bool>& dropped) {
  if (samples.empty()) return true;
  const std::size_t d = samples[0].coeffs.size();
  std::vector<std::vector<Rat>> A;
  std::vector<Rat> b;
  bool any_negative_kept = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (dropped[i]) continue;
    const auto& s = samples[i];
    if (s.coeffs.size() != d)
      throw std::invalid_argument("exact_pattern_realizable: ragged samples");
    std::vector<Rat> row(d);
    if (s.label > 0) {
      row = s.coeffs;            // <c, w> >= 0
      b.push_back(Rat(0));
    } else {
      for (std::size_t j = 0; j < d; ++j) row[j] = -s.coeffs[j];  // <c, w> <= -1
      b.push_back(Rat(1));
      any_negative_kept = true;
    }
    A.push_back(std::move(row));
  }
  if (!any_negative_kept) return true;  // w = 0 classifies every +1 sample correctly
  return rational_lp_feasible(A, b);
}

// Exhaustive oracle: OPT_{0-1} <= theta over the weighted sample list?
// Enumerates every error set of mass <= theta (sorted ascending by mass with
// prefix pruning) and tests realizability of the complement.
inline bool opt_zero_one_at_most(const std::vector<ExactSample>& samples, const Rat& theta,
                                 std::size_t subset_cap = 1u << 20) {
  const std::size_t n = samples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return samples[a].mass < samples[b].mass; });

  std::vector<bool> dropped(n, false);
  std::size_t visited = 0;
  bool found = false;

  // Depth-first over subsets of the mass-sorted prefix; ascending masses make
  // the "does not fit" cut exact for all deeper choices.
  auto rec = [&](auto&& self, std::size_t pos, const Rat& used) -> void {
    if (found) return;
    if (++visited > subset_cap)
      throw std::runtime_error("opt_zero_one_at_most: subset cap exceeded");
    if (exact_pattern_realizable(samples, dropped)) {
      found = true;
      return;
    }
    for (std::size_t t = pos; t < n && !found; ++t) {
      const std::size_t idx = order[t];
      const Rat next = used + samples[idx].mass;
      if (next > theta) break;  // sorted: nothing later fits either
      dropped[idx] = true;
      self(self, t + 1, next);
      dropped[idx] = false;
    }
  };
  rec(rec, 0, Rat(0));
  return found;
}

}  // namespace margin
