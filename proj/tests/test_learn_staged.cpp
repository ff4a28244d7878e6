// Staged spectral learner: guess-sequence enumeration with conditioned
// second-moment corrections.

#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "margin/erm.hpp"
#include "margin/error.hpp"
#include "margin/harness.hpp"
#include "margin/io.hpp"
#include "margin/learn_staged.hpp"
#include "margin/types.hpp"
#include "oracles.hpp"

namespace {

using margin::LearnParams;
using margin::LearnReport;
using margin::Vector;
using margin::WeightedDataset;

bool has_flag(const LearnReport& r, const std::string& f) {
  for (const auto& s : r.flags)
    if (s == f) return true;
  return false;
}

WeightedDataset random_support_dataset(int d, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  WeightedDataset D;
  D.dim = d;
  D.X.resize(m, d);
  D.y.resize(m);
  D.p.resize(m);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    Vector x(d);
    for (int j = 0; j < d; ++j) x[j] = gauss(rng);
    x *= std::pow(unif(rng), 1.0 / d) / x.norm();
    D.X.row(i) = x.transpose();
    D.y[i] = (rng() & 1ull) ? 1 : -1;
    double w = -std::log(unif(rng));
    D.p[i] = w;
    total += w;
  }
  D.p /= total;
  // Exact unit mass via largest entry absorbing the residual.
  Eigen::Index imax;
  D.p.maxCoeff(&imax);
  D.p[imax] += 1.0 - D.p.sum();
  return D;
}

TEST(LearnStaged, RealizableDataReachesZeroHalfMarginError) {
  margin::SyntheticSpec spec;
  spec.dim = 2;
  spec.n_samples = 40;
  spec.gamma = 0.5;
  spec.planted_seed = 21;
  margin::SyntheticData gen = margin::gen_synthetic(spec);
  LearnParams p;
  p.gamma = 0.5;
  p.delta_slack = 1.0;
  p.budget_cap = 30000;
  LearnReport r = margin::learn_staged(gen.D, p);
  EXPECT_EQ(r.train_margin_errors.g2, 0.0);
  EXPECT_EQ(r.train_zero_one, 0.0);
  EXPECT_LE(r.hypothesis.w.norm(), 1.0 + 1e-9);
}

TEST(LearnStaged, SingleSampleClassifiedWithFullMargin) {
  WeightedDataset D;
  D.dim = 2;
  D.X.resize(1, 2);
  D.X << 1.0, 0.0;
  D.y.resize(1);
  D.y << 1.0;
  D.p.resize(1);
  D.p << 1.0;
  LearnParams p;
  p.gamma = 0.5;
  p.delta_slack = 1.0;
  p.budget_cap = 5000;
  LearnReport r = margin::learn_staged(D, p);
  EXPECT_EQ(r.train_margin_errors.g2, 0.0);
}

// Output half-margin error within (1+delta)*OPT plus net slack, with OPT
// certified by the dense-net minimizer.
TEST(LearnStaged, NearOptimalOnRandomExplicitDistributions) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    WeightedDataset D = random_support_dataset(3, 12 + static_cast<int>(seed) * 4,
                                               6000 + seed);
    LearnParams p;
    p.gamma = 0.35;
    p.delta_slack = 1.0;
    p.budget_cap = 1'000'000;
    LearnReport r = margin::learn_staged(D, p);
    auto [h_opt, opt] = margin::brute_force_erm(D, p.gamma, 0.01);
    EXPECT_LE(r.train_margin_errors.g2, 2.0 * opt + 0.02)
        << "seed " << seed << " opt " << opt;
  }
}

TEST(LearnStaged, StageBudgetConstantsReported) {
  WeightedDataset D = random_support_dataset(2, 8, 1);
  LearnParams p;
  p.gamma = 0.5;
  p.delta_slack = 1.0;
  p.budget_cap = 2000;
  LearnReport r = margin::learn_staged(D, p);
  // floor(8/(delta*gamma^2)) + 2 with delta=1, gamma=0.5.
  EXPECT_DOUBLE_EQ(r.extras.at("kmax_sum"), 34.0);
  EXPECT_DOUBLE_EQ(r.extras.at("cover_resolution"), 0.125);
  EXPECT_LE(r.extras.at("rounds_completed"), 34.0);
  EXPECT_LE(r.extras.at("unique_candidates"),
            static_cast<double>(r.candidates_examined));
}

TEST(LearnStaged, ReportedBestMatchesRecomputedHalfMarginError) {
  WeightedDataset D = random_support_dataset(3, 15, 33);
  LearnParams p;
  p.gamma = 0.4;
  p.delta_slack = 1.0;
  p.budget_cap = 50000;
  LearnReport r = margin::learn_staged(D, p);
  EXPECT_NEAR(r.train_margin_errors.g2, r.extras.at("best_margin_g2"), 1e-9);
  EXPECT_NEAR(r.train_margin_errors.g2,
              oracle::margin_error_naive(D, r.hypothesis.w, p.gamma / 2.0), 1e-12);
}

TEST(LearnStaged, BudgetCapTruncatesWithFlagAndExactCount) {
  WeightedDataset D = random_support_dataset(3, 15, 9);
  LearnParams p;
  p.gamma = 0.3;
  p.delta_slack = 1.0;
  p.budget_cap = 500;
  LearnReport r = margin::learn_staged(D, p);
  EXPECT_TRUE(r.truncated);
  EXPECT_TRUE(has_flag(r, "enumeration_budget_exceeded"));
  EXPECT_EQ(r.candidates_examined, 500u);
  // Degraded but valid output: a proper halfspace with measured errors.
  EXPECT_LE(r.hypothesis.w.norm(), 1.0 + 1e-9);
}

TEST(LearnStaged, ProperAndDeterministicIncludingUnderTruncation) {
  WeightedDataset D = random_support_dataset(3, 14, 58);
  for (std::uint64_t cap : {400ull, 20000ull}) {
    LearnParams p;
    p.gamma = 0.4;
    p.delta_slack = 1.0;
    p.budget_cap = cap;
    LearnReport a = margin::learn_staged(D, p);
    LearnReport b = margin::learn_staged(D, p);
    EXPECT_EQ(margin::canonical_report(a), margin::canonical_report(b));
    EXPECT_LE(a.hypothesis.w.norm(), 1.0 + 1e-9);
  }
}

TEST(LearnStaged, ParameterValidation) {
  WeightedDataset D = random_support_dataset(2, 5, 2);
  LearnParams p;
  p.gamma = 0.5;
  p.delta_slack = 0.0;
  EXPECT_THROW(margin::learn_staged(D, p), std::invalid_argument);
  p.delta_slack = 1.5;
  EXPECT_THROW(margin::learn_staged(D, p), std::invalid_argument);
  p.delta_slack = 1.0;
  p.gamma = 0.0;
  EXPECT_THROW(margin::learn_staged(D, p), std::invalid_argument);
  p.gamma = 1.0;
  EXPECT_THROW(margin::learn_staged(D, p), std::invalid_argument);
}

}  // namespace
