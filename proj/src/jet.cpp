#include "unimodal/jet.hpp"

#include <cmath>

#include "unimodal/error.hpp"

namespace unimodal {

bool Jet3::finite() const {
  return std::isfinite(f0) && std::isfinite(f1) && std::isfinite(f2) && std::isfinite(f3);
}

Jet3 compose(const Jet3& outer, const Jet3& inner) {
  const double g1 = inner.f1;
  const double g2 = inner.f2;
  return {
      outer.f0,
      outer.f1 * g1,
      outer.f2 * g1 * g1 + outer.f1 * g2,
      outer.f3 * g1 * g1 * g1 + 3.0 * outer.f2 * g1 * g2 + outer.f1 * inner.f3,
  };
}

Jet3 invert_jet(const Jet3& j, double base_point) {
  if (j.f1 == 0.0) {
    throw Error(ErrorKind::critical_point, "cannot invert a jet with zero first derivative");
  }
  const double d = j.f1;
  const double d3 = d * d * d;
  return {base_point, 1.0 / d, -j.f2 / d3, (3.0 * j.f2 * j.f2 - d * j.f3) / (d3 * d * d)};
}

double schwarzian(const Jet3& j) {
  if (j.f1 == 0.0) {
    throw Error(ErrorKind::critical_point, "Schwarzian undefined where Df = 0");
  }
  const double q = j.f2 / j.f1;
  return j.f3 / j.f1 - 1.5 * q * q;
}

}  // namespace unimodal
