#include "unimodal/polynomial.hpp"

#include <utility>

#include "unimodal/error.hpp"

namespace unimodal {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw Error(ErrorKind::argument, "polynomial needs at least one coefficient");
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<double> Polynomial::taylor(double x) const {
  // Repeated synthetic division by (t − x).
  std::vector<double> work = coeffs_;
  const std::size_t n = work.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = n - 1; i > k; --i) work[i - 1] += x * work[i];
  }
  return work;
}

Jet3 Polynomial::jet(double x) const {
  const auto t = taylor(x);
  auto at = [&](std::size_t k) { return k < t.size() ? t[k] : 0.0; };
  return {at(0), at(1), 2.0 * at(2), 6.0 * at(3)};
}

double Polynomial::increment(double x, double dx) const {
  const auto t = taylor(x);
  double acc = 0.0;
  for (std::size_t k = t.size() - 1; k >= 1; --k) acc = acc * dx + t[k];
  return acc * dx;
}

}  // namespace unimodal
