#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace margin {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct LabeledSample {
  Vector x;
  int y;  // +1 or -1
};

// Explicit finite-support distribution on labeled unit-ball points.
// Samples are stored row-wise for fast batched margin evaluation.
struct WeightedDataset {
  Matrix X;  // m x dim, one sample per row
  Vector y;  // entries +1.0 / -1.0
  Vector p;  // nonnegative masses, sum 1 within 1e-9
  int dim = 0;

  Eigen::Index size() const { return X.rows(); }
  Vector x(Eigen::Index i) const { return X.row(i).transpose(); }
  int label(Eigen::Index i) const { return y[i] > 0 ? 1 : -1; }

  static WeightedDataset from_samples(const std::vector<LabeledSample>& samples,
                                      const std::vector<double>& probs) {
    if (samples.size() != probs.size())
      throw std::invalid_argument("dataset: |samples| != |probs|");
    if (samples.empty()) throw std::invalid_argument("dataset: empty");
    WeightedDataset D;
    D.dim = static_cast<int>(samples[0].x.size());
    D.X.resize(static_cast<Eigen::Index>(samples.size()), D.dim);
    D.y.resize(static_cast<Eigen::Index>(samples.size()));
    D.p.resize(static_cast<Eigen::Index>(samples.size()));
    for (size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].x.size() != D.dim)
        throw std::invalid_argument("dataset: inconsistent sample dimension");
      D.X.row(static_cast<Eigen::Index>(i)) = samples[i].x.transpose();
      D.y[static_cast<Eigen::Index>(i)] = samples[i].y;
      D.p[static_cast<Eigen::Index>(i)] = probs[i];
    }
    return D;
  }

  static WeightedDataset uniform(const std::vector<LabeledSample>& samples) {
    std::vector<double> probs(samples.size(), 1.0 / static_cast<double>(samples.size()));
    return from_samples(samples, probs);
  }
};

struct Halfspace {
  Vector w;
};

struct LearnParams {
  double gamma = 0.0;
  double epsilon = 0.1;
  double delta_slack = 1.0;
  double alpha = 1.0;
  double tau = 0.1;
  std::uint64_t seed = 0;
  std::uint64_t budget_cap = 10'000'000;  // candidate enumeration limit
};

// Margin error of the returned hypothesis at the four reporting thresholds.
struct MarginErrors {
  double g = 0.0;     // gamma
  double g2 = 0.0;    // gamma/2
  double g4 = 0.0;    // gamma/4
  double g099 = 0.0;  // 0.99*gamma
};

struct LearnReport {
  Halfspace hypothesis;
  double train_zero_one = 0.0;
  MarginErrors train_margin_errors;
  std::uint64_t candidates_examined = 0;
  std::int64_t wallclock_ms = 0;
  std::uint64_t seed = 0;
  bool truncated = false;                // budget_cap hit; report is partial
  double size_estimate = 0.0;            // estimated full enumeration size when truncated
  std::vector<std::string> flags;        // e.g. "degenerate_eigenspace"
  std::map<std::string, double> extras;  // algorithm-specific numeric fields
};

inline int sign_pm1(double u) { return u >= 0.0 ? 1 : -1; }

inline Vector clip_ball(const Vector& w) {
  double n = w.norm();
  return n > 1.0 ? Vector(w / n) : w;
}

}  // namespace margin
