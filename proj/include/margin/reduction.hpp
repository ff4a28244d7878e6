#pragma once

// Shared output type for the hardness-style instance generators.
//
// A generated instance carries a float dataset for the learners plus exact
// rational bookkeeping (per-sample probabilities, thresholds, margin
// parameters in squared form) so completeness/soundness gaps can be checked
// without float noise.

#include "margin/rational.hpp"
#include "margin/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace margin {

struct ReductionInstance {
  WeightedDataset dataset;
  double gamma = 0.0;
  double kappa = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;

  bool has_certificate = false;
  Halfspace certificate;  // planted solution, valid when has_certificate

  // Exact rational forms of every probability/threshold, "num/den" strings.
  std::map<std::string, std::string> exact_params;
  // Exact per-sample probability, in dataset row order. Sums to exactly 1.
  std::vector<Rat> exact_mass;

  std::vector<std::string> flags;
};

}  // namespace margin
