#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "margin/spectral.hpp"
#include "margin/types.hpp"

namespace margin {

enum class Region { ball, sphere };

struct SubspaceCover {
  std::vector<Vector> points;  // ambient coordinates, lexicographic grid order
  double resolution = 0.0;
  Region region = Region::ball;
};

struct CoverBudgetError : std::runtime_error {
  double size_estimate;
  explicit CoverBudgetError(double est)
      : std::runtime_error("cover size estimate " + std::to_string(est) + " exceeds budget"),
        size_estimate(est) {}
};

namespace detail {

// Internal grid parameters. Sphere covers run the grid at half the requested
// resolution and keep a thin band below the unit sphere: a grid point within
// r/2 of (1-r/2)*u has norm in [1-r, 1], and normalizing moves it by at most
// its distance to u again, so the normalized point lands within 2r = res of u.
struct GridSpec {
  double r;        // internal radius parameter
  double h;        // step in each basis coordinate
  std::int64_t J;  // indices run -J..J per axis
  double lo2;      // squared-norm filter lower bound (sphere only)
};

inline GridSpec grid_spec(int k, double resolution, Region region) {
  GridSpec g;
  g.r = (region == Region::sphere) ? resolution / 2.0 : resolution;
  g.h = g.r / std::sqrt(static_cast<double>(k));
  g.J = static_cast<std::int64_t>(std::floor(1.0 / g.h));
  double lo = std::max(0.5, 1.0 - g.r);
  g.lo2 = lo * lo;
  return g;
}

inline double unit_ball_volume(int k) {
  return std::pow(M_PI, k / 2.0) / std::tgamma(k / 2.0 + 1.0);
}

// Largest j >= floor_hint with s + (j*h)^2 <= hi2, correcting for sqrt
// rounding with the exact keep predicate.
inline std::int64_t fix_upper(double s, double h, double hi2, std::int64_t hint,
                              std::int64_t J) {
  std::int64_t j = hint;
  auto ok = [&](std::int64_t q) {
    double c = static_cast<double>(q) * h;
    return s + c * c <= hi2;
  };
  while (j + 1 <= J && ok(j + 1)) ++j;
  while (j >= 0 && !ok(j)) --j;
  return std::min(j, J);
}

// Smallest j >= 0 with s + (j*h)^2 >= lo2.
inline std::int64_t fix_lower(double s, double h, double lo2, std::int64_t hint) {
  std::int64_t j = std::max<std::int64_t>(hint, 0);
  auto ok = [&](std::int64_t q) {
    double c = static_cast<double>(q) * h;
    return s + c * c >= lo2;
  };
  while (j > 0 && ok(j - 1)) --j;
  while (!ok(j)) ++j;
  return j;
}

struct CoverWalk {
  int k;
  Region region;
  GridSpec g;
  const std::function<bool(const Vector&)>* fn;
  Vector c;
  bool stopped = false;

  // Walks axis `axis` with squared prefix norm `s`, lexicographic order.
  void walk(int axis, double s) {
    if (stopped) return;
    double rem = 1.0 - s;
    if (rem < 0) return;
    std::int64_t jmax =
        fix_upper(s, g.h, 1.0, static_cast<std::int64_t>(std::floor(std::sqrt(rem) / g.h)), g.J);
    if (axis < k - 1) {
      for (std::int64_t j = -jmax; j <= jmax && !stopped; ++j) {
        double cj = static_cast<double>(j) * g.h;
        c[axis] = cj;
        walk(axis + 1, s + cj * cj);
      }
      return;
    }
    // Last axis: emit the contiguous (ball) or two-sided (sphere) j-range.
    std::int64_t jmin = 0;
    if (region == Region::sphere && s < g.lo2)
      jmin = fix_lower(s, g.h, g.lo2, static_cast<std::int64_t>(std::sqrt((g.lo2 - s)) / g.h));
    if (jmin > jmax) return;
    auto emit = [&](std::int64_t j) {
      double cj = static_cast<double>(j) * g.h;
      c[axis] = cj;
      if (region == Region::sphere) {
        double n = std::sqrt(s + cj * cj);
        if (n == 0.0) return;  // origin never passes the band filter; guard anyway
        Vector u = c / n;
        if (!(*fn)(u)) stopped = true;
      } else {
        if (!(*fn)(c)) stopped = true;
      }
    };
    for (std::int64_t j = -jmax; j <= -jmin && !stopped; ++j) emit(j);
    std::int64_t pos_start = (jmin == 0) ? 1 : jmin;  // j = 0 already emitted when in range
    for (std::int64_t j = pos_start; j <= jmax && !stopped; ++j) emit(j);
  }
};

}  // namespace detail

// Rough expected point count, used for upfront budget checks and reject
// messages. Counts grid points in the region by a volume ratio; saturates to
// +inf when the raw grid size overflows.
inline double estimate_cover_size(int dim_v, double resolution, Region region) {
  auto g = detail::grid_spec(dim_v, resolution, region);
  double log_total = dim_v * std::log(static_cast<double>(2 * g.J + 1));
  double frac;
  if (region == Region::ball) {
    frac = detail::unit_ball_volume(dim_v) / std::pow(2.0, dim_v);
  } else {
    frac = detail::unit_ball_volume(dim_v) * (1.0 - std::pow(g.lo2, dim_v / 2.0)) /
           std::pow(2.0, dim_v);
  }
  double log_est = log_total + std::log(std::max(frac, 1e-300));
  if (log_est > 690.0) return std::numeric_limits<double>::infinity();
  return std::exp(log_est);
}

// Streams cover points in basis coordinates in lexicographic grid order (last
// axis fastest), skipping grid cells outside the region without visiting
// them. Sphere points are normalized in basis coordinates; bitwise-equal
// collinear duplicates are the caller's concern. Returns false when the
// callback stopped the enumeration early.
inline bool for_each_cover_point_coords(int dim_v, double resolution, Region region,
                                        const std::function<bool(const Vector&)>& fn) {
  if (dim_v < 1) throw std::invalid_argument("cover: dim_v must be >= 1");
  if (!(resolution > 0.0 && resolution <= 2.0))
    throw std::invalid_argument("cover: resolution must be in (0,2]");
  detail::CoverWalk walk;
  walk.k = dim_v;
  walk.region = region;
  walk.g = detail::grid_spec(dim_v, resolution, region);
  walk.fn = &fn;
  walk.c = Vector::Zero(dim_v);
  walk.walk(0, 0.0);
  return !walk.stopped;
}

inline SubspaceCover cover_subspace(const SubspaceBasis& B, double resolution, Region region,
                                    std::uint64_t budget_cap = 10'000'000) {
  if (B.dim_v < 1) throw std::invalid_argument("cover_subspace: dim_v must be >= 1");
  double est = estimate_cover_size(B.dim_v, resolution, region);
  if (est > static_cast<double>(budget_cap) * 4.0 + 16.0) throw CoverBudgetError(est);
  SubspaceCover C;
  C.resolution = resolution;
  C.region = region;
  Vector prev;
  bool have_prev = false;
  for_each_cover_point_coords(B.dim_v, resolution, region, [&](const Vector& c) {
    if (region == Region::sphere && have_prev && c == prev) return true;
    prev = c;
    have_prev = true;
    C.points.emplace_back(B.B * c);
    if (C.points.size() > budget_cap) throw CoverBudgetError(est);
    return true;
  });
  return C;
}

}  // namespace margin
