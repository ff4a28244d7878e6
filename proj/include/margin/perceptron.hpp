#pragma once

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>

#include "margin/error.hpp"
#include "margin/types.hpp"

namespace margin {

// Classical mistake-driven Perceptron over the dataset's support. Sample
// masses do not weight updates; the visiting order is one seeded shuffle,
// then cycled. Stops after a pass with no update or after max_passes.
// gamma_report only selects the thresholds written into the report.
inline LearnReport perceptron(const WeightedDataset& D, int max_passes, std::uint64_t seed,
                              double gamma_report = 0.0) {
  require_valid(D);
  auto t0 = std::chrono::steady_clock::now();
  std::vector<Eigen::Index> order(static_cast<size_t>(D.size()));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  Vector w = Vector::Zero(D.dim);
  std::uint64_t updates = 0;
  int passes = 0;
  for (; passes < max_passes; ++passes) {
    bool clean = true;
    for (Eigen::Index i : order) {
      double dot = D.X.row(i).dot(w);
      if (sign_pm1(dot) != D.label(i)) {
        w += D.y[i] * D.X.row(i).transpose();
        ++updates;
        clean = false;
      }
    }
    if (clean) {
      ++passes;
      break;
    }
  }

  LearnReport r;
  double n = w.norm();
  r.hypothesis.w = (n > 0.0) ? Vector(w / n) : Vector::Zero(D.dim);
  r.train_zero_one = zero_one_error(D, r.hypothesis);
  if (gamma_report > 0.0)
    r.train_margin_errors = margin_error_grid(D, r.hypothesis.w, gamma_report);
  r.candidates_examined = updates;
  r.seed = seed;
  r.extras["updates"] = static_cast<double>(updates);
  r.extras["passes"] = static_cast<double>(passes);
  r.wallclock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return r;
}

}  // namespace margin
