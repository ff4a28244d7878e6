#pragma once

// Exact rational arithmetic helpers used by the instance generators.
//
// Generated datasets carry float coordinates for the learners, but every
// probability, threshold, and certificate-margin comparison is also kept in
// exact rational form so that gap checks (which can sit far below float
// noise) are decided exactly. Values of the form a*sqrt(k) + b with rational
// a, b are compared through sign logic on squared quantities, so no radical
// is ever evaluated numerically on the exact path.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace margin {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rat rat(long long num, long long den = 1) {
  if (den == 0) throw std::invalid_argument("rat: zero denominator");
  return Rat(BigInt(num), BigInt(den));
}

inline double rat_to_double(const Rat& r) { return static_cast<double>(r); }

// Exact: every finite double is a dyadic rational.
inline Rat rat_from_double(double d) {
  if (!std::isfinite(d)) throw std::invalid_argument("rat_from_double: non-finite value");
  return Rat(d);
}

// Canonical "num/den" rendering (den always present, lowest terms, den > 0).
inline std::string rat_str(const Rat& r) {
  std::ostringstream os;
  os << numerator(r) << "/" << denominator(r);
  return os.str();
}

inline Rat rat_parse(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(BigInt(s));
  BigInt num(s.substr(0, slash));
  BigInt den(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("rat_parse: zero denominator");
  return Rat(num, den);
}

inline int sign_of(const Rat& r) {
  if (r > 0) return 1;
  if (r < 0) return -1;
  return 0;
}

// Sign of a*sqrt(s) + b for rational a, b and a nonnegative integer s.
// Decided exactly: when a and b disagree in sign the comparison reduces to
// a^2*s versus b^2.
inline int quad_sign(const Rat& a, const Rat& b, long long s) {
  if (s < 0) throw std::invalid_argument("quad_sign: negative radicand");
  const int sa = sign_of(a), sb = sign_of(b);
  if (sa == 0 || s == 0) return sb;
  if (sb == 0) return sa;
  if (sa == sb) return sa;
  // Opposite signs: |a|sqrt(s) vs |b|  <=>  a^2 s vs b^2.
  const Rat lhs = a * a * Rat(s);
  const Rat rhs = b * b;
  if (lhs == rhs) return 0;
  return (lhs > rhs) ? sa : sb;
}

// A value a*sqrt(s) + b in the quadratic field Q[sqrt(s)].
struct QuadValue {
  Rat a;  // coefficient of sqrt(s)
  Rat b;  // rational part
  long long s = 1;

  int sign() const { return quad_sign(a, b, s); }
  QuadValue operator-(const QuadValue& o) const {
    if (s != o.s) throw std::invalid_argument("QuadValue: mixed radicands");
    return QuadValue{a - o.a, b - o.b, s};
  }
};

}  // namespace margin
