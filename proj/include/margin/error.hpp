#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "margin/types.hpp"

namespace margin {

// Mass of samples with y<w,x> <= gamma. Boundary equality counts as error.
inline double margin_error(const WeightedDataset& D, const Vector& w, double gamma) {
  if (w.size() != D.dim) throw std::invalid_argument("margin_error: dimension mismatch");
  if (!(gamma >= 0.0)) throw std::invalid_argument("margin_error: gamma must be >= 0");
  Vector ym = D.y.cwiseProduct(D.X * w);
  double s = 0.0;
  for (Eigen::Index i = 0; i < ym.size(); ++i)
    if (ym[i] <= gamma) s += D.p[i];
  return s;
}

// Mass misclassified by sign(<w,x>) with sign(0) = +1.
inline double zero_one_error(const WeightedDataset& D, const Halfspace& h) {
  if (h.w.size() != D.dim) throw std::invalid_argument("zero_one_error: dimension mismatch");
  Vector dots = D.X * h.w;
  double s = 0.0;
  for (Eigen::Index i = 0; i < dots.size(); ++i)
    if (sign_pm1(dots[i]) != D.label(i)) s += D.p[i];
  return s;
}

inline MarginErrors margin_error_grid(const WeightedDataset& D, const Vector& w, double gamma) {
  MarginErrors e;
  e.g = margin_error(D, w, gamma);
  e.g2 = margin_error(D, w, gamma / 2.0);
  e.g4 = margin_error(D, w, gamma / 4.0);
  e.g099 = margin_error(D, w, 0.99 * gamma);
  return e;
}

// Empty result means the dataset satisfies every invariant.
inline std::vector<std::string> validate_dataset(const WeightedDataset& D) {
  std::vector<std::string> violations;
  auto fail = [&](Eigen::Index i, const std::string& what) {
    std::ostringstream os;
    if (i >= 0) os << "sample " << i << ": ";
    os << what;
    violations.push_back(os.str());
  };
  if (D.dim <= 0) fail(-1, "nonpositive dim");
  if (D.X.rows() == 0) fail(-1, "empty dataset");
  if (D.X.cols() != D.dim) fail(-1, "sample matrix width != dim");
  if (D.y.size() != D.X.rows() || D.p.size() != D.X.rows())
    fail(-1, "label/mass count != sample count");
  double mass = 0.0;
  for (Eigen::Index i = 0; i < D.X.rows(); ++i) {
    if (!D.X.row(i).allFinite()) fail(i, "non-finite coordinate");
    double n = D.X.row(i).norm();
    if (!(n <= 1.0 + 1e-9)) {
      std::ostringstream os;
      os << "outside unit ball (norm " << n << ")";
      fail(i, os.str());
    }
    if (i < D.y.size() && D.y[i] != 1.0 && D.y[i] != -1.0) fail(i, "label not in {+1,-1}");
    if (i < D.p.size()) {
      if (!(D.p[i] >= 0.0)) fail(i, "negative mass");
      mass += D.p[i];
    }
  }
  if (!(std::abs(mass - 1.0) <= 1e-9)) {
    std::ostringstream os;
    os << "mass " << mass;
    fail(-1, os.str());
  }
  return violations;
}

inline void require_valid(const WeightedDataset& D) {
  auto v = validate_dataset(D);
  if (!v.empty()) throw std::invalid_argument("invalid dataset: " + v.front());
}

}  // namespace margin
