#pragma once

#include <vector>

#include "unimodal/interval.hpp"
#include "unimodal/map_model.hpp"

namespace unimodal {

/// An oriented interval M with a marked subinterval J and margins M⁻, M⁺.
///
/// Stored as an anchor (the first point of M in its orientation) plus the three
/// positive piece lengths, so that images under monotone iterates keep full
/// relative precision on the pieces even when M is tiny. M⁻ is always the
/// piece that comes first in the orientation; under a decreasing step the
/// orientation flips and the image of M⁻ stays labelled M⁻.
class SplitInterval {
 public:
  SplitInterval(double anchor, int orientation, double minus, double inner, double plus);

  /// M ⊃ J in the orientation of the line (+1: M⁻ is the left margin).
  static SplitInterval from_intervals(Interval m, Interval j, int orientation = 1);

  double anchor() const { return anchor_; }
  int orientation() const { return orientation_; }
  double minus_length() const { return minus_; }
  double inner_length() const { return inner_; }
  double plus_length() const { return plus_; }
  double length() const { return minus_ + inner_ + plus_; }

  /// k-th boundary point in orientation order, k = 0..3.
  double point(int k) const;

  Interval M() const;
  Interval J() const;
  Interval M_minus() const;
  Interval M_plus() const;

 private:
  double anchor_;
  int orientation_;
  double minus_;
  double inner_;
  double plus_;
};

struct CrossRatios {
  double a;
  double b;
};

CrossRatios cross_ratios(const SplitInterval& s);

/// Image of a split under one monotone step of the map (no fold check).
SplitInterval step_split(const SmoothMap& map, const SplitInterval& s);

/// The splits fⁱ(M) ⊃ fⁱ(J), i = 0..n. Throws FoldError when some fⁱ(M),
/// i < n, contains the turning point in its interior.
std::vector<SplitInterval> split_orbit(const SmoothMap& map, const SplitInterval& s, int n);

/// First i < n with c in the interior of fⁱ(M), or −1 when fⁿ is monotone on M.
int first_fold(const SmoothMap& map, Interval m, int n);

/// Largest m ≤ n_max such that fᵐ is monotone on M.
int monotone_depth(const SmoothMap& map, Interval m, int n_max);

/// Maximal interval containing `seed` on which fⁿ is monotone.
Interval monotone_extension(const SmoothMap& map, Interval seed, int n);

double schwarzian_at(const SmoothMap& map, double x);
double schwarzian_iterate(const SmoothMap& map, double x, int n);

struct DistortionResult {
  double A;
  double B;
  SplitInterval image_split;
};

DistortionResult distortion(const SmoothMap& map, int n, const SplitInterval& s);

/// (1 + τ)² / (C⁶ τ²).
double koebe_bound(double C, double tau);

struct KoebeReport {
  double tau;
  double C;                // min of B over the subpair grid
  double derivative_ratio; // max |Dfⁿ| / min |Dfⁿ| over J
  double bound;            // K(min(C, 1), τ)
  bool pass;
};

struct KoebeOptions {
  int subpair_grid = 20;
  int derivative_grid = 1000;
};

KoebeReport koebe_check(const SmoothMap& map, int n, const SplitInterval& s, KoebeOptions options = {});

struct DistortionSums {
  double sum_margin_products;
  double sum_squares;
};

DistortionSums distortion_sums(const SmoothMap& map, int n, const SplitInterval& s);

}  // namespace unimodal
