#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "unimodal/interval.hpp"
#include "unimodal/jet.hpp"
#include "unimodal/polynomial.hpp"

namespace unimodal {

/// A C³ self-map of the line evaluated through exact third-order jets.
///
/// Everything in the cross-ratio and return-map layers is written against this
/// interface, so that the unimodal families and simple reference maps (affine
/// maps for Koebe and derivative checks) share one code path.
class SmoothMap {
 public:
  virtual ~SmoothMap() = default;

  virtual Interval domain() const = 0;
  virtual Jet3 jet(double x) const = 0;
  virtual double value(double x) const { return jet(x).f0; }
  virtual double derivative(double x) const { return jet(x).f1; }

  /// f(x + dx) − f(x) with full relative precision for small dx.
  virtual double increment(double x, double dx) const = 0;

  /// The unique interior zero of Df, if the map has one.
  virtual std::optional<double> turning_point() const = 0;
};

/// A maximal interval on which the map is strictly monotone.
struct Lap {
  Interval interval;
  int direction = 1;  // +1 increasing, −1 decreasing
};

std::vector<Lap> laps(const SmoothMap& map);

/// Affine map slope·x + offset on the whole line.
class AffineMap final : public SmoothMap {
 public:
  AffineMap(double slope, double offset);

  Interval domain() const override;
  Jet3 jet(double x) const override { return {slope_ * x + offset_, slope_, 0.0, 0.0}; }
  double value(double x) const override { return slope_ * x + offset_; }
  double increment(double, double dx) const override { return slope_ * dx; }
  std::optional<double> turning_point() const override { return std::nullopt; }

 private:
  double slope_;
  double offset_;
};

/// Identity map, used for the n = 0 conventions.
class IdentityMap final : public SmoothMap {
 public:
  Interval domain() const override;
  Jet3 jet(double x) const override { return {x, 1.0, 0.0, 0.0}; }
  double value(double x) const override { return x; }
  double increment(double, double dx) const override { return dx; }
  std::optional<double> turning_point() const override { return std::nullopt; }
};

enum class Family { logistic, quadratic, polynomial, conjugated };

const char* to_string(Family family);

/// A unimodal map family instance with its domain X, critical point c and
/// critical order. Construction validates forward invariance of X, the single
/// turning point and, for conjugated families, Dh > 0 on X.
///
/// Conjugated maps are g = h∘f∘h⁻¹ on h(X) for a polynomial diffeomorphism h.
class MapSpec final : public SmoothMap {
 public:
  /// a·x(1 − x) on [0, 1], 0 < a ≤ 4.
  static MapSpec logistic(double a);
  /// x² + c on its invariant interval [−β, β], β = (1 + √(1 − 4c))/2, −2 ≤ c ≤ 1/4.
  static MapSpec quadratic(double c);
  static MapSpec polynomial(std::vector<double> coeffs, Interval domain);
  static MapSpec conjugated(const MapSpec& base, std::vector<double> diffeo_coeffs);

  Family family() const { return family_; }
  /// a for logistic, c for quadratic, 0 otherwise.
  double parameter() const { return parameter_; }
  const Polynomial& polynomial_part() const { return poly_; }
  const MapSpec* base() const { return base_.get(); }
  const Polynomial& diffeo() const { return diffeo_; }

  Interval domain() const override { return domain_; }
  Jet3 jet(double x) const override;
  double value(double x) const override;
  double derivative(double x) const override;
  double increment(double x, double dx) const override;
  std::optional<double> turning_point() const override { return critical_; }

  double critical_point() const { return critical_; }
  double critical_value() const { return critical_value_; }
  int critical_order() const { return critical_order_; }

  /// h⁻¹(y) for conjugated families (identity otherwise).
  double to_base(double y) const;

  std::string describe() const;

 private:
  MapSpec() = default;
  void finish_construction();

  Family family_ = Family::logistic;
  double parameter_ = 0.0;
  Polynomial poly_;
  std::shared_ptr<const MapSpec> base_;
  Polynomial diffeo_;
  Interval domain_;
  double critical_ = 0.0;
  double critical_value_ = 0.0;
  int critical_order_ = 2;
};

/// Forward orbit x, f(x), …, fⁿ(x) with derivative products Dfⁱ(x).
struct Orbit {
  std::vector<double> points;
  std::vector<double> derivative_products;
};

/// Jet of the map at x ∈ X; throws a domain error outside X.
Jet3 eval_jet(const SmoothMap& map, double x);

/// Unique interior zero of Df by sign-change bisection.
double critical_point(const SmoothMap& map);

/// The point x′ on the other lap with f(x′) = f(x).
double symmetric_point(const SmoothMap& map, double x);

Orbit orbit(const SmoothMap& map, double x, int n);

/// fⁿ(x).
double iterate(const SmoothMap& map, double x, int n);

/// All solutions of f(x) = y in X, at most one per lap, ascending.
std::vector<double> lap_preimages(const SmoothMap& map, double y);

/// The solution of f(x) = y on `lap`, clamped to the lap ends when y lies
/// outside f(lap).
double lap_inverse(const SmoothMap& map, const Lap& lap, double y);

/// Preimage of [lo, hi] restricted to one lap; empty when the image of the lap
/// misses the interval.
std::optional<Interval> lap_preimage(const SmoothMap& map, const Lap& lap, const Interval& target);

/// Bisection for a root of a monotone function on [lo, hi] whose end values
/// have opposite signs. Runs to full double resolution.
template <class F>
double bisect(F&& g, double lo, double hi) {
  double glo = g(lo);
  if (glo == 0.0) return lo;
  double ghi = g(hi);
  if (ghi == 0.0) return hi;
  const bool rising = glo < 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == rising) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace unimodal
