#include "unimodal/map_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "unimodal/error.hpp"

namespace unimodal {

namespace {

constexpr int kValidationGrid = 2001;
constexpr double kDomainSlack = 1e-12;

double domain_tolerance(const Interval& x) {
  return kDomainSlack * std::max(1.0, x.length());
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

std::vector<Lap> laps(const SmoothMap& map) {
  const Interval x = map.domain();
  if (auto c = map.turning_point()) {
    const Interval left{x.lo, *c};
    const Interval right{*c, x.hi};
    return {{left, sign_of(map.derivative(left.midpoint()))},
            {right, sign_of(map.derivative(right.midpoint()))}};
  }
  const double probe = std::isfinite(x.lo) && std::isfinite(x.hi) ? x.midpoint() : 0.0;
  return {{x, sign_of(map.derivative(probe)) >= 0 ? 1 : -1}};
}

AffineMap::AffineMap(double slope, double offset) : slope_(slope), offset_(offset) {
  if (slope == 0.0) throw Error(ErrorKind::argument, "affine map needs a nonzero slope");
}

Interval AffineMap::domain() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {-inf, inf};
}

Interval IdentityMap::domain() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {-inf, inf};
}

const char* to_string(Family family) {
  switch (family) {
    case Family::logistic: return "logistic";
    case Family::quadratic: return "quadratic";
    case Family::polynomial: return "polynomial";
    case Family::conjugated: return "conjugated";
  }
  return "?";
}

MapSpec MapSpec::logistic(double a) {
  if (!(a > 0.0 && a <= 4.0)) throw Error(ErrorKind::argument, "logistic parameter must lie in (0, 4]");
  MapSpec m;
  m.family_ = Family::logistic;
  m.parameter_ = a;
  m.poly_ = Polynomial({0.0, a, -a});
  m.domain_ = {0.0, 1.0};
  m.finish_construction();
  return m;
}

MapSpec MapSpec::quadratic(double c) {
  if (!(c >= -2.0 && c <= 0.25)) throw Error(ErrorKind::argument, "quadratic parameter must lie in [-2, 1/4]");
  MapSpec m;
  m.family_ = Family::quadratic;
  m.parameter_ = c;
  m.poly_ = Polynomial({c, 0.0, 1.0});
  const double beta = 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * c));
  m.domain_ = {-beta, beta};
  m.finish_construction();
  return m;
}

MapSpec MapSpec::polynomial(std::vector<double> coeffs, Interval domain) {
  if (!(domain.lo < domain.hi)) throw Error(ErrorKind::argument, "polynomial domain must be a nondegenerate interval");
  MapSpec m;
  m.family_ = Family::polynomial;
  m.poly_ = Polynomial(std::move(coeffs));
  m.domain_ = domain;
  m.finish_construction();
  return m;
}

MapSpec MapSpec::conjugated(const MapSpec& base, std::vector<double> diffeo_coeffs) {
  MapSpec m;
  m.family_ = Family::conjugated;
  m.base_ = std::make_shared<const MapSpec>(base);
  m.diffeo_ = Polynomial(std::move(diffeo_coeffs));
  const Interval bx = base.domain();
  for (int i = 0; i < kValidationGrid; ++i) {
    const double x = bx.lo + bx.length() * i / (kValidationGrid - 1);
    if (!(m.diffeo_.jet(x).f1 > 0.0)) {
      std::ostringstream os;
      os << "conjugating polynomial is not increasing at x = " << x;
      throw Error(ErrorKind::argument, os.str());
    }
  }
  m.domain_ = {m.diffeo_(bx.lo), m.diffeo_(bx.hi)};
  m.finish_construction();
  return m;
}

void MapSpec::finish_construction() {
  const Interval x = domain_;
  const double tol = domain_tolerance(x);

  int changes = 0;
  int last_sign = 0;
  double bracket_lo = x.lo;
  double bracket_hi = x.hi;
  double prev = x.lo;
  for (int i = 0; i < kValidationGrid; ++i) {
    const double t = x.lo + x.length() * i / (kValidationGrid - 1);
    const double fx = value(t);
    if (!(fx >= x.lo - tol && fx <= x.hi + tol)) {
      std::ostringstream os;
      os.precision(17);
      os << "map does not send the domain into itself: f(" << t << ") = " << fx;
      throw Error(ErrorKind::argument, os.str());
    }
    const int s = sign_of(derivative(t));
    if (s != 0) {
      if (last_sign != 0 && s != last_sign) {
        ++changes;
        bracket_lo = prev;
        bracket_hi = t;
      }
      last_sign = s;
      prev = t;
    }
  }
  if (changes != 1) {
    std::ostringstream os;
    os << "Df changes sign " << changes << " times on the domain";
    throw Error(ErrorKind::not_unimodal, os.str());
  }
  critical_ = bisect([this](double t) { return derivative(t); }, bracket_lo, bracket_hi);
  if (!x.interior_contains(critical_)) throw Error(ErrorKind::not_unimodal, "turning point is not interior");
  critical_value_ = value(critical_);

  if (family_ == Family::conjugated) {
    critical_order_ = base_->critical_order();
  } else {
    const auto t = poly_.taylor(critical_);
    double scale = 0.0;
    for (double v : t) scale = std::max(scale, std::abs(v));
    critical_order_ = 0;
    for (std::size_t k = 2; k < t.size(); ++k) {
      if (std::abs(t[k]) > 1e-9 * scale) {
        critical_order_ = static_cast<int>(k);
        break;
      }
    }
    if (critical_order_ == 0) throw Error(ErrorKind::not_unimodal, "flat critical point");
  }
}

double MapSpec::to_base(double y) const {
  if (family_ != Family::conjugated) return y;
  // Safeguarded Newton on the increasing polynomial h.
  const Interval bx = base_->domain();
  double lo = bx.lo;
  double hi = bx.hi;
  if (y <= diffeo_(lo)) return lo;
  if (y >= diffeo_(hi)) return hi;
  double x = lo + (hi - lo) * (y - diffeo_(lo)) / (diffeo_(hi) - diffeo_(lo));
  for (int it = 0; it < 100; ++it) {
    const Jet3 j = diffeo_.jet(x);
    const double r = j.f0 - y;
    if (r == 0.0) return x;
    if (r < 0.0) lo = x; else hi = x;
    double next = x - r / j.f1;
    if (!(next > lo && next < hi)) next = lo + 0.5 * (hi - lo);
    if (std::abs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) return next;
    if (next == x) return x;
    x = next;
  }
  return x;
}

Jet3 MapSpec::jet(double y) const {
  if (family_ != Family::conjugated) return poly_.jet(y);
  const double x = to_base(y);
  const Jet3 inverse = invert_jet(diffeo_.jet(x), x);
  const Jet3 inner = base_->jet(x);
  return compose(diffeo_.jet(inner.f0), compose(inner, inverse));
}

double MapSpec::value(double y) const {
  if (family_ != Family::conjugated) return poly_(y);
  return diffeo_(base_->value(to_base(y)));
}

double MapSpec::derivative(double y) const {
  if (family_ != Family::conjugated) return poly_.jet(y).f1;
  const double x = to_base(y);
  return diffeo_.jet(base_->value(x)).f1 * base_->derivative(x) / diffeo_.jet(x).f1;
}

double MapSpec::increment(double y, double dy) const {
  if (family_ != Family::conjugated) return poly_.increment(y, dy);
  if (dy == 0.0) return 0.0;
  const double x = to_base(y);
  // Solve h(x + dx) − h(x) = dy for dx; h is increasing so this is monotone in dx.
  double dx = dy / diffeo_.jet(x).f1;
  for (int it = 0; it < 60; ++it) {
    const double r = diffeo_.increment(x, dx) - dy;
    const double step = r / diffeo_.jet(x + dx).f1;
    dx -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(dx)) break;
  }
  const double df = base_->increment(x, dx);
  return diffeo_.increment(base_->value(x), df);
}

std::string MapSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (family_) {
    case Family::logistic: os << "logistic(a=" << parameter_ << ")"; break;
    case Family::quadratic: os << "quadratic(c=" << parameter_ << ")"; break;
    case Family::polynomial: {
      os << "polynomial(";
      bool first = true;
      for (double c : poly_.coefficients()) {
        os << (first ? "" : ",") << c;
        first = false;
      }
      os << ")";
      break;
    }
    case Family::conjugated: {
      os << "conjugated(" << base_->describe() << ", h=";
      bool first = true;
      for (double c : diffeo_.coefficients()) {
        os << (first ? "" : ",") << c;
        first = false;
      }
      os << ")";
      break;
    }
  }
  return os.str();
}

Jet3 eval_jet(const SmoothMap& map, double x) {
  const Interval dom = map.domain();
  const double tol = std::isfinite(dom.length()) ? domain_tolerance(dom) : 0.0;
  if (!(x >= dom.lo - tol && x <= dom.hi + tol)) {
    std::ostringstream os;
    os.precision(17);
    os << "x = " << x << " outside [" << dom.lo << ", " << dom.hi << "]";
    throw Error(ErrorKind::domain, os.str());
  }
  return map.jet(x);
}

double critical_point(const SmoothMap& map) {
  const Interval x = map.domain();
  if (!std::isfinite(x.length())) throw Error(ErrorKind::not_unimodal, "map has no bounded domain");
  double prev = x.lo;
  int prev_sign = sign_of(map.derivative(prev));
  for (int i = 1; i < kValidationGrid; ++i) {
    const double t = x.lo + x.length() * i / (kValidationGrid - 1);
    const int s = sign_of(map.derivative(t));
    if (s != 0 && prev_sign != 0 && s != prev_sign) {
      return bisect([&](double u) { return map.derivative(u); }, prev, t);
    }
    if (s != 0) {
      prev = t;
      prev_sign = s;
    }
  }
  throw Error(ErrorKind::not_unimodal, "no sign change of Df");
}

double symmetric_point(const SmoothMap& map, double x) {
  const auto c = map.turning_point();
  if (!c) throw Error(ErrorKind::not_unimodal, "map has no turning point");
  const Interval dom = map.domain();
  if (x == *c) throw Error(ErrorKind::argument, "the critical point is its own symmetric point");
  if (!dom.contains(x)) throw Error(ErrorKind::domain, "point outside the domain");
  const auto all = laps(map);
  const Lap& other = x < *c ? all[1] : all[0];
  const double y = map.value(x);
  const Interval range = Interval::spanning(map.value(other.interval.lo), map.value(other.interval.hi));
  const double slack = 1e-15 * std::max(1.0, std::abs(y));
  if (y < range.lo - slack || y > range.hi + slack) {
    std::ostringstream os;
    os.precision(17);
    os << "f(x) = " << y << " is not attained on the other lap";
    throw Error(ErrorKind::no_symmetric_point, os.str());
  }
  return lap_inverse(map, other, y);
}

Orbit orbit(const SmoothMap& map, double x, int n) {
  if (n < 0) throw Error(ErrorKind::argument, "orbit length must be nonnegative");
  Orbit o;
  o.points.reserve(n + 1);
  o.derivative_products.reserve(n + 1);
  o.points.push_back(x);
  o.derivative_products.push_back(1.0);
  for (int i = 0; i < n; ++i) {
    const Jet3 j = map.jet(o.points.back());
    o.derivative_products.push_back(o.derivative_products.back() * j.f1);
    o.points.push_back(j.f0);
  }
  return o;
}

double iterate(const SmoothMap& map, double x, int n) {
  for (int i = 0; i < n; ++i) x = map.value(x);
  return x;
}

double lap_inverse(const SmoothMap& map, const Lap& lap, double y) {
  const double a = lap.interval.lo;
  const double b = lap.interval.hi;
  const double fa = map.value(a);
  const double fb = map.value(b);
  if (lap.direction > 0) {
    if (y <= fa) return a;
    if (y >= fb) return b;
  } else {
    if (y >= fa) return a;
    if (y <= fb) return b;
  }
  return bisect([&](double t) { return map.value(t) - y; }, a, b);
}

std::optional<Interval> lap_preimage(const SmoothMap& map, const Lap& lap, const Interval& target) {
  const Interval image = Interval::spanning(map.value(lap.interval.lo), map.value(lap.interval.hi));
  const double lo = std::max(image.lo, target.lo);
  const double hi = std::min(image.hi, target.hi);
  if (lo > hi) return std::nullopt;
  return Interval::spanning(lap_inverse(map, lap, lo), lap_inverse(map, lap, hi));
}

std::vector<double> lap_preimages(const SmoothMap& map, double y) {
  std::vector<double> out;
  for (const Lap& lap : laps(map)) {
    const Interval image = Interval::spanning(map.value(lap.interval.lo), map.value(lap.interval.hi));
    if (!image.contains(y)) continue;
    const double x = lap_inverse(map, lap, y);
    if (out.empty() || x != out.back()) out.push_back(x);
  }
  return out;
}

}  // namespace unimodal
