// Spectral-projection learner: eigenspace restriction + sphere-net argmin.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "margin/cover.hpp"
#include "margin/error.hpp"
#include "margin/harness.hpp"
#include "margin/io.hpp"
#include "margin/learn_basic.hpp"
#include "margin/spectral.hpp"
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

TEST(LearnBasic, RealizableSeparableDataGetsZeroQuarterMarginError) {
  margin::SyntheticSpec spec;
  spec.dim = 2;
  spec.n_samples = 60;
  spec.gamma = 0.5;
  spec.planted_seed = 17;
  margin::SyntheticData gen = margin::gen_synthetic(spec);
  LearnParams p;
  p.gamma = 0.5;
  p.epsilon = 0.4;
  LearnReport r = margin::learn_basic(gen.D, p);
  EXPECT_EQ(r.train_margin_errors.g4, 0.0);
  EXPECT_EQ(r.train_zero_one, 0.0);
  EXPECT_FALSE(r.truncated);
}

TEST(LearnBasic, ContradictoryPointKeepsLighterMass) {
  WeightedDataset D;
  D.dim = 2;
  D.X.resize(2, 2);
  D.X << 1.0, 0.0, 1.0, 0.0;
  D.y.resize(2);
  D.y << 1.0, -1.0;
  D.p.resize(2);
  D.p << 0.9, 0.1;
  LearnParams p;
  p.gamma = 0.5;
  p.epsilon = 0.4;
  LearnReport r = margin::learn_basic(D, p);
  EXPECT_DOUBLE_EQ(r.train_margin_errors.g4, 0.1);
  EXPECT_LE(r.train_margin_errors.g4, 0.1 + p.epsilon);
}

TEST(LearnBasic, QuarterMarginErrorWithinContractOfExactOptimum) {
  for (double eps : {0.3, 0.5}) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      margin::SyntheticSpec spec;
      spec.dim = 2;
      spec.n_samples = 30;
      spec.gamma = 0.35;
      spec.noise_rate = (seed % 3 == 0) ? 0.0 : 0.15;
      spec.planted_seed = 2600 + seed;
      margin::SyntheticData gen = margin::gen_synthetic(spec);
      LearnParams p;
      p.gamma = spec.gamma;
      p.epsilon = eps;
      LearnReport r = margin::learn_basic(gen.D, p);
      ASSERT_FALSE(r.truncated);
      double opt = oracle::opt2d_exact(gen.D, spec.gamma);
      EXPECT_LE(r.train_margin_errors.g4, opt + 7.0 * eps / 8.0 + 1e-9)
          << "seed " << seed << " eps " << eps;
    }
  }
}

TEST(LearnBasic, TinySpectrumYieldsDegenerateFlagAndZeroVector) {
  WeightedDataset D;
  D.dim = 3;
  D.X.resize(2, 3);
  D.X << 1e-3, 0.0, 0.0, -1e-3, 0.0, 0.0;
  D.y.resize(2);
  D.y << 1.0, -1.0;
  D.p.resize(2);
  D.p << 0.5, 0.5;
  LearnParams p;
  p.gamma = 0.5;
  p.epsilon = 0.4;
  LearnReport r = margin::learn_basic(D, p);
  EXPECT_TRUE(has_flag(r, "degenerate_eigenspace"));
  EXPECT_EQ(r.hypothesis.w.norm(), 0.0);
}

TEST(LearnBasic, CandidateCountWithinExplicitGridBound) {
  margin::SyntheticSpec spec;
  spec.dim = 3;
  spec.n_samples = 50;
  spec.gamma = 0.7;
  spec.planted_seed = 5;
  margin::SyntheticData gen = margin::gen_synthetic(spec);
  LearnParams p;
  p.gamma = 0.7;
  p.epsilon = 0.7;
  LearnReport r = margin::learn_basic(gen.D, p);
  ASSERT_FALSE(r.truncated);
  double delta = p.epsilon * p.gamma * p.gamma / 16.0;
  double dim_v = r.extras.at("dim_v");
  EXPECT_LE(dim_v, 1.0 / delta + 1e-9);
  EXPECT_LE(static_cast<double>(r.candidates_examined),
            std::pow(6.0 / delta, dim_v));
  EXPECT_GT(r.candidates_examined, 0u);
}

// The returned hypothesis beats every point of its own net.
TEST(LearnBasic, OutputIsArgminOverOwnCover) {
  margin::SyntheticSpec spec;
  spec.dim = 2;
  spec.n_samples = 25;
  spec.gamma = 0.5;
  spec.noise_rate = 0.1;
  spec.planted_seed = 99;
  margin::SyntheticData gen = margin::gen_synthetic(spec);
  LearnParams p;
  p.gamma = 0.5;
  p.epsilon = 0.5;
  LearnReport r = margin::learn_basic(gen.D, p);
  ASSERT_FALSE(r.truncated);

  double delta = p.epsilon * p.gamma * p.gamma / 16.0;
  margin::SubspaceBasis V =
      margin::eigenspace_above(margin::eigendecompose(margin::second_moment(gen.D)), delta);
  ASSERT_GE(V.dim_v, 1);
  std::uint64_t n = 0;
  double best = 2.0;
  margin::for_each_cover_point_coords(
      V.dim_v, delta / 2.0, margin::Region::sphere, [&](const Vector& c) {
        ++n;
        Vector w = V.B * c;
        best = std::min(best, oracle::margin_error_naive(gen.D, w, p.gamma / 4.0));
        return true;
      });
  EXPECT_EQ(n, r.candidates_examined);
  EXPECT_NEAR(r.train_margin_errors.g4, best, 1e-12);
  EXPECT_NEAR(r.extras.at("best_cover_error_g4"), best, 1e-12);
}

TEST(LearnBasic, BudgetCapTruncatesWithFlagAndEstimate) {
  margin::SyntheticSpec spec;
  spec.dim = 3;
  spec.n_samples = 40;
  spec.gamma = 0.3;
  spec.planted_seed = 7;
  margin::SyntheticData gen = margin::gen_synthetic(spec);
  LearnParams p;
  p.gamma = 0.3;
  p.epsilon = 0.3;
  p.budget_cap = 100;
  LearnReport r = margin::learn_basic(gen.D, p);
  EXPECT_TRUE(r.truncated);
  EXPECT_TRUE(has_flag(r, "cover_budget_exceeded"));
  EXPECT_EQ(r.candidates_examined, 100u);
  EXPECT_GT(r.size_estimate, 100.0);
}

TEST(LearnBasic, ProperAndDeterministic) {
  margin::SyntheticSpec spec;
  spec.dim = 2;
  spec.n_samples = 20;
  spec.gamma = 0.4;
  spec.noise_rate = 0.1;
  spec.planted_seed = 3;
  margin::SyntheticData gen = margin::gen_synthetic(spec);
  LearnParams p;
  p.gamma = 0.4;
  p.epsilon = 0.5;
  LearnReport a = margin::learn_basic(gen.D, p);
  LearnReport b = margin::learn_basic(gen.D, p);
  EXPECT_LE(a.hypothesis.w.norm(), 1.0 + 1e-9);
  EXPECT_EQ(margin::canonical_report(a), margin::canonical_report(b));
}

TEST(LearnBasic, ParameterValidation) {
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
  p.epsilon = 1.0;
  EXPECT_THROW(margin::learn_basic(D, p), std::invalid_argument);
  p.epsilon = 0.0;
  EXPECT_THROW(margin::learn_basic(D, p), std::invalid_argument);
}

}  // namespace
