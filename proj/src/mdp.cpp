#include "unimodal/mdp.hpp"

#include <algorithm>
#include <sstream>

#include "unimodal/error.hpp"

namespace unimodal {

namespace {

bool violates(const SplitInterval& p, const SplitInterval& q) {
  return interiors_intersect(p.M_minus(), q.M_minus()) && interiors_intersect(p.M_plus(), q.M_plus());
}

}  // namespace

MdpVerdict check_mdp(const SplitCollection& coll) {
  const int n = static_cast<int>(coll.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (violates(coll[i], coll[j])) return {std::make_pair(i + 1, j + 1)};
    }
  }
  return {};
}

SplitCollection orbit_collection(const SmoothMap& map, const SplitInterval& s, int n) {
  return split_orbit(map, s, n);
}

MdpOrbitVerdict check_mdp_orbit(const SmoothMap& map, const SplitInterval& s, int n) {
  const SplitCollection coll = orbit_collection(map, s, n);
  MdpOrbitVerdict out;
  for (int i = 0; i < n; ++i) {
    if (violates(coll[i], coll[n])) {
      out.reduced.violation = std::make_pair(i + 1, n + 1);
      break;
    }
  }
  out.full = check_mdp(coll);
  return out;
}

MarginSumBound margin_sum_bound(const SplitCollection& coll, const Interval& x) {
  const MdpVerdict v = check_mdp(coll);
  if (!v.pass()) {
    std::ostringstream os;
    os << "collection violates margins disjointness at pair (" << v.violation->first << ", "
       << v.violation->second << ")";
    throw Error(ErrorKind::precondition, os.str());
  }
  MarginSumBound out{0.0, 0.0, true};
  double longest = 0.0;
  for (const SplitInterval& s : coll) {
    out.sum += s.minus_length() * s.plus_length();
    longest = std::max(longest, s.length());
  }
  out.bound = 2.0 * x.length() * longest;
  out.pass = out.sum <= out.bound;
  return out;
}

MdpVerdict mdp_from_critical_pullback(const SmoothMap& map, const SplitInterval& s, int n) {
  const auto c = map.turning_point();
  if (!c) throw Error(ErrorKind::precondition, "map has no critical point");
  const SplitCollection coll = orbit_collection(map, s, n);
  if (!coll.back().J().contains(*c)) {
    throw Error(ErrorKind::precondition, "critical point is not in the n-th image of J");
  }
  return check_mdp(coll);
}

}  // namespace unimodal
