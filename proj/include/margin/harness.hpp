#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <nlohmann/json.hpp>

#include "margin/chow.hpp"
#include "margin/erm.hpp"
#include "margin/error.hpp"
#include "margin/learn_basic.hpp"
#include "margin/learn_staged.hpp"
#include "margin/perceptron.hpp"
#include "margin/types.hpp"

namespace margin {

struct SyntheticSpec {
  int dim = 2;
  int n_samples = 100;
  double gamma = 0.1;
  double noise_rate = 0.0;  // eta in [0, 1/2)
  std::uint64_t planted_seed = 0;
};

struct SyntheticData {
  WeightedDataset D;
  Halfspace planted;
  std::vector<int> flip_indices;
  double flip_mass = 0.0;  // sum of masses over flip_indices, ascending
  double acceptance_estimate = 1.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// P(|<w,x>| >= gamma) for x uniform on the unit sphere in d dimensions.
inline double margin_acceptance_probability(int d, double gamma) {
  if (d == 1) return 1.0;  // x = +-1
  return boost::math::ibetac(0.5, (d - 1) / 2.0, gamma * gamma);
}

namespace detail {

inline Vector random_unit(std::mt19937_64& rng, int d, std::normal_distribution<double>& gauss) {
  Vector v(d);
  for (;;) {
    for (int i = 0; i < d; ++i) v[i] = gauss(rng);
    double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

inline SyntheticData gen_with_planted(const Vector& w_star, int n, double gamma, double eta,
                                      std::uint64_t sample_seed) {
  int d = static_cast<int>(w_star.size());
  std::mt19937_64 rng(sample_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SyntheticData out;
  out.planted.w = w_star;
  out.D.dim = d;
  out.D.X.resize(n, d);
  out.D.y.resize(n);
  out.D.p = Vector::Constant(n, 1.0 / static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    Vector x;
    do {
      x = random_unit(rng, d, gauss);
    } while (std::abs(w_star.dot(x)) < gamma);
    int y = sign_pm1(w_star.dot(x));
    if (unif(rng) < eta) {
      y = -y;
      out.flip_indices.push_back(i);
    }
    out.D.X.row(i) = x.transpose();
    out.D.y[i] = y;
  }
  for (int i : out.flip_indices) out.flip_mass += out.D.p[i];
  return out;
}

}  // namespace detail

// Margin-conditioned uniform-sphere data labeled by a seeded planted unit
// vector, with independent post-hoc label flips at rate eta. The planted
// vector's margin error just below gamma equals the flip mass exactly.
inline SyntheticData gen_synthetic(const SyntheticSpec& spec) {
  if (spec.dim < 1 || spec.n_samples < 1) throw std::invalid_argument("gen_synthetic: size");
  if (!(spec.gamma > 0.0 && spec.gamma < 1.0)) throw std::invalid_argument("gen_synthetic: gamma");
  if (!(spec.noise_rate >= 0.0 && spec.noise_rate < 0.5))
    throw std::invalid_argument("gen_synthetic: eta must be in [0, 1/2)");
  double acc = margin_acceptance_probability(spec.dim, spec.gamma);
  if (acc < 1e-6) {
    std::ostringstream os;
    os << "gen_synthetic: margin acceptance estimate " << acc << " below 1e-6";
    throw std::invalid_argument(os.str());
  }
  std::mt19937_64 seed_rng(spec.planted_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector w_star = detail::random_unit(seed_rng, spec.dim, gauss);
  SyntheticData out = detail::gen_with_planted(w_star, spec.n_samples, spec.gamma,
                                               spec.noise_rate, splitmix64(spec.planted_seed));
  out.acceptance_estimate = acc;
  return out;
}

using LearnerFn = std::function<LearnReport(const WeightedDataset&, const LearnParams&)>;

struct GenCheckResult {
  bool pass = false;
  bool insufficient_m = false;
  int trials = 0;
  int trials_passed = 0;
  double required_m = 0.0;
  std::vector<double> test_zero_one;
  std::vector<double> train_margin_prime;
};

// Train/test experiment for the uniform-convergence contract: in each trial
// the learner sees m_train fresh samples and must satisfy
//   test 0-1 error <= train margin error at gamma_prime + epsilon + 3*sigma
// with sigma the binomial std of the test estimate. Passes when >= 90% of
// trials do. Gated on m_train >= 100/(epsilon^2 gamma^2).
inline GenCheckResult run_generalization_check(const SyntheticSpec& spec, const LearnerFn& learner,
                                               const LearnParams& params, double gamma_prime,
                                               int m_train, int m_test, int trials) {
  GenCheckResult res;
  res.trials = trials;
  res.required_m = 100.0 / (params.epsilon * params.epsilon * spec.gamma * spec.gamma);
  if (static_cast<double>(m_train) < res.required_m) {
    res.insufficient_m = true;
    return res;
  }
  std::mt19937_64 seed_rng(spec.planted_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector w_star = detail::random_unit(seed_rng, spec.dim, gauss);
  double sigma3 = 3.0 * 0.5 / std::sqrt(static_cast<double>(m_test));
  for (int t = 0; t < trials; ++t) {
    std::uint64_t s = splitmix64(spec.planted_seed ^ (0xC0FFEEull + static_cast<std::uint64_t>(t)));
    SyntheticData all = detail::gen_with_planted(w_star, m_train + m_test, spec.gamma,
                                                 spec.noise_rate, s);
    WeightedDataset train, test;
    train.dim = test.dim = spec.dim;
    train.X = all.D.X.topRows(m_train);
    train.y = all.D.y.head(m_train);
    train.p = Vector::Constant(m_train, 1.0 / m_train);
    test.X = all.D.X.bottomRows(m_test);
    test.y = all.D.y.tail(m_test);
    test.p = Vector::Constant(m_test, 1.0 / m_test);
    LearnParams p = params;
    p.gamma = spec.gamma;
    p.seed = s;
    LearnReport rep = learner(train, p);
    double tr = margin_error(train, rep.hypothesis.w, gamma_prime);
    double te = zero_one_error(test, rep.hypothesis);
    res.test_zero_one.push_back(te);
    res.train_margin_prime.push_back(tr);
    if (te <= tr + p.epsilon + sigma3) ++res.trials_passed;
  }
  res.pass = res.trials_passed * 10 >= trials * 9;
  return res;
}

struct SweepCell {
  std::string learner;  // basic | staged | chow | perceptron
  int dim = 2;
  double gamma = 0.2;
  double eps = 0.1;
  double delta = 1.0;
  double alpha = 2.0;
  double eta = 0.0;
  int m_train = 100;
  int m_test = 100;
  std::uint64_t budget_cap = 10'000'000;
  int max_passes = 1000;          // perceptron only
  double oracle_resolution = 0.0;  // > 0: run brute_force_erm on the train set
};

struct SweepRow {
  SweepCell cell;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double train_01 = 0.0, test_01 = 0.0;
  MarginErrors margins;
  bool has_oracle = false;
  double opt_oracle = 0.0;
  std::uint64_t candidates = 0;
  std::int64_t ms = 0;
};

struct ExperimentReport {
  std::vector<SweepRow> rows;
  std::uint64_t master_seed = 0;
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline LearnReport dispatch_learner(const std::string& name, const WeightedDataset& train,
                                    const LearnParams& p, int max_passes) {
  if (name == "basic") return learn_basic(train, p);
  if (name == "staged") return learn_staged(train, p);
  if (name == "chow") return learn_alpha(train, p);
  if (name == "perceptron") return perceptron(train, max_passes, p.seed, p.gamma);
  throw std::invalid_argument("unknown learner: " + name);
}

}  // namespace detail

// Serial deterministic sweep: cell i runs with seed splitmix64(master ^ i);
// failures are recorded in the row and the sweep continues.
inline ExperimentReport sweep(const std::vector<SweepCell>& cells, std::uint64_t master_seed) {
  ExperimentReport rep;
  rep.master_seed = master_seed;
  for (size_t i = 0; i < cells.size(); ++i) {
    const SweepCell& cell = cells[i];
    SweepRow row;
    row.cell = cell;
    row.seed = splitmix64(master_seed ^ static_cast<std::uint64_t>(i));
    try {
      SyntheticSpec spec;
      spec.dim = cell.dim;
      spec.n_samples = cell.m_train + cell.m_test;
      spec.gamma = cell.gamma;
      spec.noise_rate = cell.eta;
      spec.planted_seed = row.seed;
      SyntheticData all = gen_synthetic(spec);
      WeightedDataset train, test;
      train.dim = test.dim = cell.dim;
      train.X = all.D.X.topRows(cell.m_train);
      train.y = all.D.y.head(cell.m_train);
      train.p = Vector::Constant(cell.m_train, 1.0 / cell.m_train);
      test.X = all.D.X.bottomRows(cell.m_test);
      test.y = all.D.y.tail(cell.m_test);
      test.p = Vector::Constant(cell.m_test, 1.0 / cell.m_test);

      LearnParams p;
      p.gamma = cell.gamma;
      p.epsilon = cell.eps;
      p.delta_slack = cell.delta;
      p.alpha = cell.alpha;
      p.seed = row.seed;
      p.budget_cap = cell.budget_cap;
      LearnReport lr = detail::dispatch_learner(cell.learner, train, p, cell.max_passes);
      row.train_01 = lr.train_zero_one;
      row.test_01 = zero_one_error(test, lr.hypothesis);
      row.margins = margin_error_grid(train, lr.hypothesis.w, cell.gamma);
      row.candidates = lr.candidates_examined;
      row.ms = lr.wallclock_ms;
      if (cell.oracle_resolution > 0.0) {
        auto [h, v] = brute_force_erm(train, cell.gamma, cell.oracle_resolution);
        (void)h;
        row.has_oracle = true;
        row.opt_oracle = v;
      }
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

inline std::string sweep_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os << "learner,dim,gamma,eps,delta,alpha,eta,m_train,m_test,train_01,test_01,"
        "train_margin_g,train_margin_g2,train_margin_g4,train_margin_099g,"
        "opt_oracle,candidates,ms,seed\n";
  using detail::fmt_double;
  for (const auto& r : rep.rows) {
    os << r.cell.learner << ',' << r.cell.dim << ',' << fmt_double(r.cell.gamma) << ','
       << fmt_double(r.cell.eps) << ',' << fmt_double(r.cell.delta) << ','
       << fmt_double(r.cell.alpha) << ',' << fmt_double(r.cell.eta) << ',' << r.cell.m_train
       << ',' << r.cell.m_test << ',';
    if (r.failed) {
      os << ",,,,,,,,";
    } else {
      os << fmt_double(r.train_01) << ',' << fmt_double(r.test_01) << ','
         << fmt_double(r.margins.g) << ',' << fmt_double(r.margins.g2) << ','
         << fmt_double(r.margins.g4) << ',' << fmt_double(r.margins.g099) << ','
         << (r.has_oracle ? fmt_double(r.opt_oracle) : std::string()) << ',' << r.candidates
         << ',';
    }
    os << r.ms << ',' << r.seed << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json sweep_json(const ExperimentReport& rep) {
  nlohmann::ordered_json j;
  j["master_seed"] = rep.master_seed;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.rows) {
    nlohmann::ordered_json row;
    row["learner"] = r.cell.learner;
    row["dim"] = r.cell.dim;
    row["gamma"] = r.cell.gamma;
    row["eps"] = r.cell.eps;
    row["delta"] = r.cell.delta;
    row["alpha"] = r.cell.alpha;
    row["eta"] = r.cell.eta;
    row["m_train"] = r.cell.m_train;
    row["m_test"] = r.cell.m_test;
    if (r.failed) {
      row["error"] = r.error;
    } else {
      row["train_01"] = r.train_01;
      row["test_01"] = r.test_01;
      row["train_margin_g"] = r.margins.g;
      row["train_margin_g2"] = r.margins.g2;
      row["train_margin_g4"] = r.margins.g4;
      row["train_margin_099g"] = r.margins.g099;
      if (r.has_oracle) row["opt_oracle"] = r.opt_oracle;
      row["candidates"] = r.candidates;
    }
    row["ms"] = r.ms;
    row["seed"] = r.seed;
    j["rows"].push_back(row);
  }
  return j;
}

}  // namespace margin
