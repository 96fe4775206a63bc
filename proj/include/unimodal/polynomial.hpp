#pragma once

#include <span>
#include <vector>

#include "unimodal/jet.hpp"

namespace unimodal {

/// Real polynomial with coefficients in ascending order of degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  std::span<const double> coefficients() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  double operator()(double x) const;
  Jet3 jet(double x) const;

  /// p(x + dx) − p(x), evaluated from the Taylor expansion at x so that the
  /// result keeps full relative precision when |dx| is small.
  double increment(double x, double dx) const;

  /// Taylor coefficients p^(k)(x)/k!, k = 0..degree.
  std::vector<double> taylor(double x) const;

 private:
  std::vector<double> coeffs_;
};

}  // namespace unimodal
