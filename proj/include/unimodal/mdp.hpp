#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "unimodal/crossratio.hpp"

namespace unimodal {

/// Ordered splits M_i ⊃ J_i, i = 1..n, all in one ambient interval.
using SplitCollection = std::vector<SplitInterval>;

/// Margins disjointness verdict. `violation` holds the first offending pair
/// (i, j), i < j, 1-based, in lexicographic order.
struct MdpVerdict {
  std::optional<std::pair<int, int>> violation;

  bool pass() const { return !violation.has_value(); }
};

/// M_i⁻ ∩ M_j⁻ ≠ ∅ implies M_i⁺ ∩ M_j⁺ = ∅ for every pair; margins sharing only
/// an endpoint are disjoint.
MdpVerdict check_mdp(const SplitCollection& coll);

struct MdpOrbitVerdict {
  MdpVerdict reduced;  // pairs (i, n) only
  MdpVerdict full;     // all pairs
};

SplitCollection orbit_collection(const SmoothMap& map, const SplitInterval& s, int n);

MdpOrbitVerdict check_mdp_orbit(const SmoothMap& map, const SplitInterval& s, int n);

struct MarginSumBound {
  double sum;
  double bound;
  bool pass;
};

/// Σ|M_i⁻||M_i⁺| against 2|X|·max|M_i|. Requires an MDP-passing collection.
MarginSumBound margin_sum_bound(const SplitCollection& coll, const Interval& x);

/// Orbit collection of a split whose n-th image of J contains the critical
/// point; the collection is expected to pass check_mdp.
MdpVerdict mdp_from_critical_pullback(const SmoothMap& map, const SplitInterval& s, int n);

}  // namespace unimodal
