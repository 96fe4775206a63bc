#pragma once

namespace unimodal {

/// Value and first three derivatives of a map at a point.
struct Jet3 {
  double f0 = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;

  bool finite() const;
};

/// Jet of outer∘inner, where `outer` is taken at inner.f0 (Faà di Bruno to third order).
Jet3 compose(const Jet3& outer, const Jet3& inner);

/// Jet of the local inverse of a map at the image point j.f0. The inverse's
/// value is the point the jet was taken at, which a jet does not record, so it
/// is passed as `base_point`.
Jet3 invert_jet(const Jet3& j, double base_point);

/// D³f/Df − (3/2)(D²f/Df)². Throws critical_point when f1 == 0.
double schwarzian(const Jet3& j);

}  // namespace unimodal
