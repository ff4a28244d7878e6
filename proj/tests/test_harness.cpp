// Synthetic data generation, the train/test generalization experiment, and
// the benchmark sweep with its serializers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "margin/error.hpp"
#include "margin/harness.hpp"
#include "margin/perceptron.hpp"
#include "margin/types.hpp"

namespace {

using margin::LearnParams;
using margin::LearnReport;
using margin::SyntheticData;
using margin::SyntheticSpec;
using margin::Vector;
using margin::WeightedDataset;

TEST(Splitmix64, KnownVectors) {
  // Published reference outputs of the splitmix64 generator.
  EXPECT_EQ(margin::splitmix64(0), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(margin::splitmix64(1), 0x910A2DEC89025CC1ull);
  EXPECT_NE(margin::splitmix64(2), margin::splitmix64(3));
}

TEST(MarginAcceptance, ClosedFormsInLowDimension) {
  // d = 1: every unit sample has margin 1.
  EXPECT_DOUBLE_EQ(margin::margin_acceptance_probability(1, 0.9), 1.0);
  // d = 2: P(|<w,x>| >= g) = 1 - (2/pi) asin(g); at g = 1/2 this is 2/3.
  EXPECT_NEAR(margin::margin_acceptance_probability(2, 0.5), 2.0 / 3.0, 1e-12);
  // d = 3: the inner product is uniform on [-1, 1], so the answer is 1 - g.
  EXPECT_NEAR(margin::margin_acceptance_probability(3, 0.3), 0.7, 1e-12);
  EXPECT_NEAR(margin::margin_acceptance_probability(3, 0.85), 0.15, 1e-12);
  // Monotone decreasing in the margin.
  EXPECT_GT(margin::margin_acceptance_probability(5, 0.1),
            margin::margin_acceptance_probability(5, 0.2));
}

TEST(GenSynthetic, PlantedMarginAndFlipAccountingExact) {
  SyntheticSpec spec;
  spec.dim = 4;
  spec.n_samples = 300;
  spec.gamma = 0.25;
  spec.noise_rate = 0.1;
  spec.planted_seed = 7;
  SyntheticData g = margin::gen_synthetic(spec);
  margin::require_valid(g.D);
  EXPECT_NEAR(g.planted.w.norm(), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(g.acceptance_estimate,
                   margin::margin_acceptance_probability(spec.dim, spec.gamma));
  // Every sample is unit length and clears the planted margin pre-flip.
  std::vector<int> observed_flips;
  for (int i = 0; i < 300; ++i) {
    Vector x = g.D.X.row(i).transpose();
    EXPECT_NEAR(x.norm(), 1.0, 1e-9);
    const double dot = g.planted.w.dot(x);
    EXPECT_GE(std::abs(dot), spec.gamma);
    if (static_cast<int>(g.D.y[i]) != margin::sign_pm1(dot)) observed_flips.push_back(i);
  }
  EXPECT_EQ(observed_flips, g.flip_indices);
  ASSERT_FALSE(g.flip_indices.empty());
  for (std::size_t i = 1; i < g.flip_indices.size(); ++i)
    EXPECT_LT(g.flip_indices[i - 1], g.flip_indices[i]);
  // The planted vector's error just below gamma is exactly the flipped mass,
  // and its plain misclassification mass is the same.
  EXPECT_DOUBLE_EQ(g.flip_mass,
                   margin::margin_error(g.D, g.planted.w, spec.gamma * (1.0 - 1e-12)));
  EXPECT_DOUBLE_EQ(margin::zero_one_error(g.D, g.planted), g.flip_mass);
}

TEST(GenSynthetic, NoiselessHasNoFlips) {
  SyntheticSpec spec;
  spec.dim = 3;
  spec.n_samples = 80;
  spec.gamma = 0.2;
  spec.noise_rate = 0.0;
  spec.planted_seed = 11;
  SyntheticData g = margin::gen_synthetic(spec);
  EXPECT_TRUE(g.flip_indices.empty());
  EXPECT_DOUBLE_EQ(g.flip_mass, 0.0);
  EXPECT_DOUBLE_EQ(margin::zero_one_error(g.D, g.planted), 0.0);
}

TEST(GenSynthetic, DeterministicAndSeedSensitive) {
  SyntheticSpec spec;
  spec.dim = 5;
  spec.n_samples = 60;
  spec.gamma = 0.15;
  spec.noise_rate = 0.05;
  spec.planted_seed = 99;
  SyntheticData a = margin::gen_synthetic(spec);
  SyntheticData b = margin::gen_synthetic(spec);
  EXPECT_TRUE(a.D.X == b.D.X);
  EXPECT_TRUE(a.D.y == b.D.y);
  EXPECT_EQ(a.flip_indices, b.flip_indices);
  spec.planted_seed = 100;
  SyntheticData c = margin::gen_synthetic(spec);
  EXPECT_FALSE(a.D.X == c.D.X);
}

TEST(GenSynthetic, ParameterValidation) {
  SyntheticSpec spec;
  spec.dim = 0;
  EXPECT_THROW(margin::gen_synthetic(spec), std::invalid_argument);
  spec.dim = 2;
  spec.n_samples = 0;
  EXPECT_THROW(margin::gen_synthetic(spec), std::invalid_argument);
  spec.n_samples = 10;
  spec.gamma = 0.0;
  EXPECT_THROW(margin::gen_synthetic(spec), std::invalid_argument);
  spec.gamma = 1.0;
  EXPECT_THROW(margin::gen_synthetic(spec), std::invalid_argument);
  spec.gamma = 0.2;
  spec.noise_rate = 0.5;
  EXPECT_THROW(margin::gen_synthetic(spec), std::invalid_argument);
  spec.noise_rate = 0.0;
  // Margin acceptance below 1e-6 is refused rather than looping forever.
  spec.dim = 400;
  spec.gamma = 0.9;
  EXPECT_THROW(margin::gen_synthetic(spec), std::invalid_argument);
}

TEST(GeneralizationCheck, RefusesInsufficientTrainingSize) {
  SyntheticSpec spec;
  spec.dim = 3;
  spec.gamma = 0.3;
  LearnParams p;
  p.epsilon = 0.3;
  auto learner = [](const WeightedDataset& D, const LearnParams& q) {
    return margin::perceptron(D, 50, q.seed, q.gamma);
  };
  auto res = margin::run_generalization_check(spec, learner, p, 0.15, 100, 100, 3);
  EXPECT_TRUE(res.insufficient_m);
  EXPECT_FALSE(res.pass);
  EXPECT_TRUE(res.test_zero_one.empty());
  EXPECT_DOUBLE_EQ(res.required_m, 100.0 / (0.09 * 0.09));
}

TEST(GeneralizationCheck, PerceptronPassesOnRealizableData) {
  SyntheticSpec spec;
  spec.dim = 3;
  spec.gamma = 0.3;
  spec.noise_rate = 0.0;
  spec.planted_seed = 21;
  LearnParams p;
  p.epsilon = 0.3;
  auto learner = [](const WeightedDataset& D, const LearnParams& q) {
    return margin::perceptron(D, 200, q.seed, q.gamma);
  };
  const int m_train = 12400;  // just above 100/(eps^2 gamma^2) = 12345.7
  auto res = margin::run_generalization_check(spec, learner, p, 0.15, m_train, 500, 3);
  EXPECT_FALSE(res.insufficient_m);
  ASSERT_EQ(res.test_zero_one.size(), 3u);
  ASSERT_EQ(res.train_margin_prime.size(), 3u);
  EXPECT_TRUE(res.pass);
  EXPECT_EQ(res.trials_passed, 3);
  for (double te : res.test_zero_one) EXPECT_LE(te, 0.1);
}

std::vector<margin::SweepCell> small_sweep_cells() {
  std::vector<margin::SweepCell> cells;
  {
    margin::SweepCell c;
    c.learner = "basic";
    c.dim = 2;
    c.gamma = 0.5;
    c.eps = 0.5;
    c.m_train = 40;
    c.m_test = 40;
    c.oracle_resolution = 0.1;
    cells.push_back(c);
  }
  {
    margin::SweepCell c;
    c.learner = "staged";
    c.dim = 2;
    c.gamma = 0.5;
    c.eps = 0.3;
    c.delta = 1.0;
    c.m_train = 30;
    c.m_test = 30;
    c.budget_cap = 30000;
    cells.push_back(c);
  }
  {
    margin::SweepCell c;
    c.learner = "perceptron";
    c.dim = 3;
    c.gamma = 0.3;
    c.m_train = 50;
    c.m_test = 50;
    c.max_passes = 100;
    cells.push_back(c);
  }
  {
    margin::SweepCell c;
    c.learner = "chow";
    c.dim = 2;
    c.gamma = 0.4;
    c.eps = 0.3;
    c.alpha = 2.0;
    c.m_train = 12;
    c.m_test = 12;
    c.budget_cap = 20;
    cells.push_back(c);
  }
  {
    // alpha < 1 is rejected by the learner: the row must fail in isolation.
    margin::SweepCell c;
    c.learner = "chow";
    c.dim = 2;
    c.gamma = 0.4;
    c.alpha = 0.5;
    c.m_train = 10;
    c.m_test = 10;
    cells.push_back(c);
  }
  return cells;
}

TEST(Sweep, SeedsRowsAndIsolatesFailures) {
  auto cells = small_sweep_cells();
  margin::ExperimentReport rep = margin::sweep(cells, 424242);
  ASSERT_EQ(rep.rows.size(), cells.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i)
    EXPECT_EQ(rep.rows[i].seed, margin::splitmix64(424242ull ^ static_cast<std::uint64_t>(i)));
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    EXPECT_FALSE(rep.rows[i].failed) << "row " << i << ": " << rep.rows[i].error;
    EXPECT_GE(rep.rows[i].train_01, 0.0);
    EXPECT_LE(rep.rows[i].test_01, 1.0);
  }
  EXPECT_TRUE(rep.rows.back().failed);
  EXPECT_FALSE(rep.rows.back().error.empty());
  // The exhaustive-search column lower-bounds the learner's margin error.
  EXPECT_TRUE(rep.rows[0].has_oracle);
  EXPECT_LE(rep.rows[0].opt_oracle, rep.rows[0].margins.g + 1e-12);
  EXPECT_FALSE(rep.rows[1].has_oracle);
}

TEST(Sweep, SerializationsDeterministicAfterZeroingTimings) {
  auto cells = small_sweep_cells();
  margin::ExperimentReport a = margin::sweep(cells, 7);
  margin::ExperimentReport b = margin::sweep(cells, 7);
  for (auto& r : a.rows) r.ms = 0;
  for (auto& r : b.rows) r.ms = 0;
  EXPECT_EQ(margin::sweep_csv(a), margin::sweep_csv(b));
  EXPECT_EQ(margin::sweep_json(a).dump(), margin::sweep_json(b).dump());
}

TEST(SweepCsv, HeaderAndColumnCounts) {
  auto cells = small_sweep_cells();
  margin::ExperimentReport rep = margin::sweep(cells, 3);
  for (auto& r : rep.rows) r.ms = 0;
  std::string csv = margin::sweep_csv(rep);
  std::istringstream is(csv);
  std::string line;
  ASSERT_TRUE(std::getline(is, line));
  EXPECT_EQ(line,
            "learner,dim,gamma,eps,delta,alpha,eta,m_train,m_test,train_01,test_01,"
            "train_margin_g,train_margin_g2,train_margin_g4,train_margin_099g,"
            "opt_oracle,candidates,ms,seed");
  const auto commas = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')), commas);
    ++rows;
  }
  EXPECT_EQ(rows, cells.size());
}

TEST(DispatchLearner, RunsEachRegisteredAlgorithmAndRejectsUnknown) {
  SyntheticSpec spec;
  spec.dim = 2;
  spec.n_samples = 16;
  spec.gamma = 0.6;
  spec.planted_seed = 5;
  WeightedDataset D = margin::gen_synthetic(spec).D;
  LearnParams p;
  p.gamma = 0.6;
  p.epsilon = 0.6;
  p.alpha = 1.5;
  p.budget_cap = 20;
  for (const char* name : {"basic", "staged", "chow", "perceptron"}) {
    LearnReport r = margin::detail::dispatch_learner(name, D, p, 50);
    EXPECT_EQ(static_cast<int>(r.hypothesis.w.size()), 2) << name;
  }
  EXPECT_THROW(margin::detail::dispatch_learner("mystery", D, p, 50), std::invalid_argument);
}

}  // namespace
