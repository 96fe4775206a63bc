#include "unimodal/crossratio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "unimodal/error.hpp"

namespace unimodal {

namespace {

constexpr double kNearCritical = 1e-9;

double a_ratio(double minus, double inner, double plus) {
  const double total = minus + inner + plus;
  return inner * total / ((minus + inner) * (inner + plus));
}

double b_ratio(double minus, double inner, double plus) {
  const double total = minus + inner + plus;
  return inner * total / (minus * plus);
}

// Consecutive points of an oriented chain, anchor plus positive gaps.
struct Chain {
  double anchor;
  int orientation;
  std::vector<double> gaps;
};

Chain step_chain(const SmoothMap& map, const Chain& chain) {
  Chain out{map.value(chain.anchor), chain.orientation, {}};
  out.gaps.reserve(chain.gaps.size());
  double p = chain.anchor;
  int sign = 0;
  for (double gap : chain.gaps) {
    const double d = map.increment(p, chain.orientation * gap);
    if (sign == 0) sign = d > 0.0 ? 1 : -1;
    out.gaps.push_back(std::abs(d));
    p += chain.orientation * gap;
  }
  out.orientation = sign;
  return out;
}

double critical_preimage(const SmoothMap& map, Interval m, int steps, double c) {
  auto g = [&](double x) { return iterate(map, x, steps) - c; };
  return bisect(g, m.lo, m.hi);
}

}  // namespace

SplitInterval::SplitInterval(double anchor, int orientation, double minus, double inner, double plus)
    : anchor_(anchor), orientation_(orientation >= 0 ? 1 : -1), minus_(minus), inner_(inner), plus_(plus) {
  const bool ok = std::isfinite(anchor) && minus > 0.0 && inner > 0.0 && plus > 0.0 &&
                  std::isfinite(minus) && std::isfinite(inner) && std::isfinite(plus);
  if (!ok) {
    std::ostringstream os;
    os.precision(17);
    os << "split needs positive finite pieces, got (" << minus << ", " << inner << ", " << plus << ")";
    throw Error(ErrorKind::degenerate_split, os.str());
  }
}

SplitInterval SplitInterval::from_intervals(Interval m, Interval j, int orientation) {
  if (!(m.lo <= j.lo && j.hi <= m.hi && j.lo < j.hi)) {
    throw Error(ErrorKind::degenerate_split, "J must be a nondegenerate subinterval of M");
  }
  if (orientation >= 0) return {m.lo, 1, j.lo - m.lo, j.hi - j.lo, m.hi - j.hi};
  return {m.hi, -1, m.hi - j.hi, j.hi - j.lo, j.lo - m.lo};
}

double SplitInterval::point(int k) const {
  double offset = 0.0;
  if (k >= 1) offset += minus_;
  if (k >= 2) offset += inner_;
  if (k >= 3) offset += plus_;
  return anchor_ + orientation_ * offset;
}

Interval SplitInterval::M() const { return Interval::spanning(point(0), point(3)); }
Interval SplitInterval::J() const { return Interval::spanning(point(1), point(2)); }
Interval SplitInterval::M_minus() const { return Interval::spanning(point(0), point(1)); }
Interval SplitInterval::M_plus() const { return Interval::spanning(point(2), point(3)); }

CrossRatios cross_ratios(const SplitInterval& s) {
  return {a_ratio(s.minus_length(), s.inner_length(), s.plus_length()),
          b_ratio(s.minus_length(), s.inner_length(), s.plus_length())};
}

SplitInterval step_split(const SmoothMap& map, const SplitInterval& s) {
  const Chain next = step_chain(
      map, Chain{s.anchor(), s.orientation(), {s.minus_length(), s.inner_length(), s.plus_length()}});
  return {next.anchor, next.orientation, next.gaps[0], next.gaps[1], next.gaps[2]};
}

int first_fold(const SmoothMap& map, Interval m, int n) {
  const auto c = map.turning_point();
  if (!c) return -1;
  for (int i = 0; i < n; ++i) {
    if (m.interior_contains(*c)) return i;
    m = Interval::spanning(map.value(m.lo), map.value(m.hi));
  }
  return -1;
}

int monotone_depth(const SmoothMap& map, Interval m, int n_max) {
  const auto c = map.turning_point();
  if (!c) return n_max;
  for (int i = 0; i < n_max; ++i) {
    if (m.interior_contains(*c)) return i;
    m = Interval::spanning(map.value(m.lo), map.value(m.hi));
  }
  return n_max;
}

Interval monotone_extension(const SmoothMap& map, Interval seed, int n) {
  const Interval dom = map.domain();
  if (!map.turning_point()) return dom;
  if (first_fold(map, seed, n) >= 0) throw FoldError(first_fold(map, seed, n), seed.midpoint());
  auto monotone = [&](Interval m) { return first_fold(map, m, n) < 0; };
  auto search = [&](double good, double bad, auto make) {
    for (int it = 0; it < 200; ++it) {
      const double mid = good + 0.5 * (bad - good);
      if (mid == good || mid == bad) break;
      if (monotone(make(mid))) good = mid; else bad = mid;
    }
    return good;
  };
  double lo = dom.lo;
  if (!monotone({dom.lo, seed.hi})) {
    lo = search(seed.lo, dom.lo, [&](double x) { return Interval{x, seed.hi}; });
  }
  double hi = dom.hi;
  if (!monotone({seed.lo, dom.hi})) {
    hi = search(seed.hi, dom.hi, [&](double x) { return Interval{seed.lo, x}; });
  }
  return {lo, hi};
}

std::vector<SplitInterval> split_orbit(const SmoothMap& map, const SplitInterval& s, int n) {
  if (n < 0) throw Error(ErrorKind::argument, "iterate count must be nonnegative");
  const int fold = first_fold(map, s.M(), n);
  if (fold >= 0) {
    throw FoldError(fold, critical_preimage(map, s.M(), fold, *map.turning_point()));
  }
  std::vector<SplitInterval> out;
  out.reserve(n + 1);
  out.push_back(s);
  for (int i = 0; i < n; ++i) out.push_back(step_split(map, out.back()));
  return out;
}

double schwarzian_at(const SmoothMap& map, double x) {
  if (auto c = map.turning_point(); c && std::abs(x - *c) <= kNearCritical) {
    std::ostringstream os;
    os.precision(17);
    os << "x = " << x << " is within " << kNearCritical << " of the critical point";
    throw Error(ErrorKind::critical_point, os.str());
  }
  return schwarzian(eval_jet(map, x));
}

double schwarzian_iterate(const SmoothMap& map, double x, int n) {
  if (n < 0) throw Error(ErrorKind::argument, "iterate count must be nonnegative");
  const auto c = map.turning_point();
  double sum = 0.0;
  double dfi = 1.0;
  for (int i = 0; i < n; ++i) {
    if (c && std::abs(x - *c) <= kNearCritical) {
      std::ostringstream os;
      os << "orbit reaches the critical point at step " << i;
      throw Error(ErrorKind::critical_orbit, os.str());
    }
    const Jet3 j = map.jet(x);
    sum += schwarzian(j) * dfi * dfi;
    dfi *= j.f1;
    x = j.f0;
  }
  return sum;
}

DistortionResult distortion(const SmoothMap& map, int n, const SplitInterval& s) {
  if (n == 0) return {1.0, 1.0, s};
  const auto splits = split_orbit(map, s, n);
  const CrossRatios before = cross_ratios(s);
  const CrossRatios after = cross_ratios(splits.back());
  return {after.a / before.a, after.b / before.b, splits.back()};
}

double koebe_bound(double C, double tau) {
  if (!(C > 0.0 && C <= 1.0) || !(tau > 0.0)) {
    throw Error(ErrorKind::argument, "Koebe bound needs 0 < C <= 1 and tau > 0");
  }
  const double c3 = C * C * C;
  return (1.0 + tau) * (1.0 + tau) / (c3 * c3 * tau * tau);
}

KoebeReport koebe_check(const SmoothMap& map, int n, const SplitInterval& s, KoebeOptions options) {
  if (options.subpair_grid < 3 || options.derivative_grid < 2) {
    throw Error(ErrorKind::argument, "Koebe grids are too coarse");
  }
  const auto splits = split_orbit(map, s, n);
  const SplitInterval& image = splits.back();
  const double tau = std::min(image.minus_length(), image.plus_length()) / image.inner_length();
  if (!(tau > 0.0)) throw Error(ErrorKind::degenerate, "image margin is empty");

  // Subpair grid: all J* ⊂ M* ⊂ M with endpoints on G + 1 equally spaced nodes.
  const int g = options.subpair_grid;
  Chain chain{s.anchor(), s.orientation(), std::vector<double>(g, s.length() / g)};
  for (int i = 0; i < n; ++i) chain = step_chain(map, chain);
  std::vector<double> image_prefix(g + 1, 0.0);
  for (int k = 0; k < g; ++k) image_prefix[k + 1] = image_prefix[k] + chain.gaps[k];
  const double unit = s.length() / g;
  double c_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g; ++i) {
    for (int j = i + 1; j < g; ++j) {
      for (int k = j + 1; k < g; ++k) {
        for (int l = k + 1; l <= g; ++l) {
          const double before = b_ratio((j - i) * unit, (k - j) * unit, (l - k) * unit);
          const double after = b_ratio(image_prefix[j] - image_prefix[i], image_prefix[k] - image_prefix[j],
                                       image_prefix[l] - image_prefix[k]);
          c_min = std::min(c_min, after / before);
        }
      }
    }
  }

  const Interval jint = s.J();
  double dmax = 0.0;
  double dmin = std::numeric_limits<double>::infinity();
  const int m = options.derivative_grid;
  for (int k = 0; k < m; ++k) {
    const double x = jint.lo + jint.length() * k / (m - 1);
    const double d = std::abs(orbit(map, x, n).derivative_products.back());
    dmax = std::max(dmax, d);
    dmin = std::min(dmin, d);
  }
  KoebeReport report{};
  report.tau = tau;
  report.C = c_min;
  report.derivative_ratio = dmax / dmin;
  report.bound = koebe_bound(std::min(c_min, 1.0), tau);
  report.pass = report.derivative_ratio <= report.bound;
  return report;
}

DistortionSums distortion_sums(const SmoothMap& map, int n, const SplitInterval& s) {
  const auto splits = split_orbit(map, s, n);
  DistortionSums t{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    t.sum_margin_products += splits[i].minus_length() * splits[i].plus_length();
    t.sum_squares += splits[i].length() * splits[i].length();
  }
  return t;
}

}  // namespace unimodal
