#pragma once

#include <algorithm>
#include <cmath>

namespace unimodal {

/// Closed interval [lo, hi] on the real line.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval spanning(double a, double b) { return {std::min(a, b), std::max(a, b)}; }

  double length() const { return hi - lo; }
  double midpoint() const { return lo + 0.5 * (hi - lo); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
  bool interior_contains(double x) const { return lo < x && x < hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Open-interval semantics: intervals sharing only an endpoint do not meet.
inline bool interiors_intersect(const Interval& a, const Interval& b) {
  return std::max(a.lo, b.lo) < std::min(a.hi, b.hi);
}

}  // namespace unimodal
