#include "unimodal/return_maps.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "unimodal/error.hpp"

namespace unimodal {

namespace {

constexpr double kInteriorShrink = 1e-12;
constexpr double kSymmetryTol = 1e-10;
constexpr double kCycleTol = 1e-12;
constexpr double kSafeSnapTol = 1e-8;
constexpr std::size_t kCycleWindow = 64;

double require_turning_point(const SmoothMap& map) {
  const auto c = map.turning_point();
  if (!c) throw Error(ErrorKind::not_unimodal, "map has no critical point");
  return *c;
}

const Lap& lap_of(const std::vector<Lap>& all, double x) {
  return all.size() == 1 || x <= all[0].interval.hi ? all[0] : all[1];
}

}  // namespace

std::vector<double> preimages(const SmoothMap& map, double y) { return lap_preimages(map, y); }

NicenessVerdict is_nice(const SmoothMap& map, Interval T, int horizon, std::span<const double> safe_points) {
  const double c = require_turning_point(map);
  if (!T.interior_contains(c)) throw Error(ErrorKind::argument, "interval does not surround the critical point");
  const double fl = map.value(T.lo);
  const double fr = map.value(T.hi);
  if (std::abs(fl - fr) > kSymmetryTol * std::max(1.0, std::abs(fl))) {
    std::ostringstream os;
    os.precision(17);
    os << "interval is not symmetric: f(lo) = " << fl << ", f(hi) = " << fr;
    throw Error(ErrorKind::argument, os.str());
  }
  NicenessVerdict v;
  v.min_gap = std::numeric_limits<double>::infinity();
  if (horizon <= 0) return v;

  const double inner_lo = T.lo + kInteriorShrink;
  const double inner_hi = T.hi - kInteriorShrink;
  for (double start : {T.lo, T.hi}) {
    std::deque<double> recent{start};
    double y = start;
    for (int i = 1; i <= horizon; ++i) {
      y = map.value(y);
      v.min_gap = std::min(v.min_gap, std::max(T.lo - y, y - T.hi));
      if (y > inner_lo && y < inner_hi) {
        v.pass = false;
        v.failed_at = v.failed_at < 0 ? i : std::min(v.failed_at, i);
        break;
      }
      bool closed = false;
      for (double s : safe_points) {
        if (std::abs(y - s) <= kSafeSnapTol) closed = true;
      }
      for (double r : recent) {
        if (std::abs(y - r) <= kCycleTol) closed = true;
      }
      if (closed) {
        v.shortcut = true;
        break;
      }
      recent.push_back(y);
      if (recent.size() > kCycleWindow) recent.pop_front();
    }
  }
  return v;
}

NiceInterval nice_from_periodic(const SmoothMap& map, double p, int period, int horizon) {
  const double c = require_turning_point(map);
  if (period < 1) throw Error(ErrorKind::argument, "period must be positive");
  const Orbit o = orbit(map, p, period);
  if (std::abs(o.points.back() - p) > 1e-10) {
    std::ostringstream os;
    os.precision(17);
    os << "point is not periodic: f^" << period << "(p) - p = " << o.points.back() - p;
    throw Error(ErrorKind::precondition, os.str());
  }
  std::vector<double> cycle(o.points.begin(), o.points.end() - 1);
  double q = cycle.front();
  for (double x : cycle) {
    if (std::abs(x - c) < std::abs(q - c)) q = x;
  }
  if (std::abs(q - c) <= 1e-12) throw Error(ErrorKind::degenerate, "periodic orbit passes through the critical point");
  const double q_sym = symmetric_point(map, q);
  const Interval T = Interval::spanning(q, q_sym);
  for (double x : cycle) {
    if (x > T.lo + kInteriorShrink && x < T.hi - kInteriorShrink) {
      throw Error(ErrorKind::construction_failed, "periodic orbit enters the interior of the candidate interval");
    }
  }
  const NicenessVerdict v = is_nice(map, T, horizon, cycle);
  if (!v.pass) {
    std::ostringstream os;
    os << "boundary orbit enters the interior at iterate " << v.failed_at;
    throw Error(ErrorKind::construction_failed, os.str());
  }
  return {T, horizon, std::isfinite(v.min_gap) ? v.min_gap : 0.0};
}

EntryMapDecomposition first_entry_decomposition(const SmoothMap& map, const NiceInterval& T, int depth,
                                                DecompositionOptions options) {
  const double c = require_turning_point(map);
  if (depth < 0) throw Error(ErrorKind::argument, "depth must be nonnegative");
  const auto all_laps = laps(map);
  const double critical_value = map.value(c);

  struct Piece {
    Interval interval;
    int sign;
  };
  EntryMapDecomposition out;
  out.T = T;
  out.depth = depth;
  std::vector<Piece> level{{T.T, 1}};
  const Interval tt = T.T;

  for (int n = 1; n <= depth && !level.empty(); ++n) {
    std::vector<Piece> next;
    for (const Piece& parent : level) {
      std::optional<Interval> left = lap_preimage(map, all_laps[0], parent.interval);
      std::optional<Interval> right = lap_preimage(map, all_laps[1], parent.interval);
      std::vector<Piece> components;
      if (left && right && parent.interval.contains(critical_value)) {
        components.push_back({{left->lo, right->hi}, 0});
      } else {
        if (left) components.push_back({*left, parent.sign * all_laps[0].direction});
        if (right) components.push_back({*right, parent.sign * all_laps[1].direction});
      }
      for (const Piece& comp : components) {
        const Interval v = comp.interval;
        if (v.length() < options.min_length) continue;
        Branch b;
        b.entry_time = n;
        b.domain = v;
        b.is_central = comp.sign == 0 && v.contains(c);
        b.sign = comp.sign;
        out.branches.push_back(b);
        if (v.lo >= tt.lo - kInteriorShrink && v.hi <= tt.hi + kInteriorShrink) continue;
        // Outside T: first arrival at time n, keep pulling back. Contact with
        // ∂T only trims a sliver.
        if (v.hi <= tt.lo || v.lo >= tt.hi) {
          next.push_back(comp);
        } else {
          if (v.lo < tt.lo) next.push_back({{v.lo, tt.lo}, comp.sign});
          if (v.hi > tt.hi) next.push_back({{tt.hi, v.hi}, comp.sign});
        }
      }
    }
    level = std::move(next);
    if (level.size() > options.max_intervals) {
      out.partial = true;
      out.depth = n;
      break;
    }
  }

  std::sort(out.branches.begin(), out.branches.end(),
            [](const Branch& a, const Branch& b) { return a.domain.lo < b.domain.lo; });
  double covered = 0.0;
  for (std::size_t i = 0; i < out.branches.size(); ++i) {
    covered += out.branches[i].domain.length();
    if (i + 1 < out.branches.size() && out.branches[i].domain.hi > out.branches[i + 1].domain.lo + 1e-12) {
      std::ostringstream os;
      os.precision(17);
      os << "overlapping entry domains [" << out.branches[i].domain.lo << ", " << out.branches[i].domain.hi
         << "] and [" << out.branches[i + 1].domain.lo << ", " << out.branches[i + 1].domain.hi << "]";
      throw Error(ErrorKind::internal, os.str());
    }
  }
  out.uncovered_measure = std::max(0.0, map.domain().length() - covered);
  return out;
}

const Branch* central_branch(const EntryMapDecomposition& decomp) {
  for (const Branch& b : decomp.branches) {
    if (b.is_central) return &b;
  }
  return nullptr;
}

const Branch* branch_containing(const EntryMapDecomposition& decomp, double x) {
  auto it = std::upper_bound(decomp.branches.begin(), decomp.branches.end(), x,
                             [](double v, const Branch& b) { return v < b.domain.lo; });
  if (it == decomp.branches.begin()) return nullptr;
  --it;
  return it->domain.contains(x) ? &*it : nullptr;
}

std::optional<int> entry_time(const SmoothMap& map, Interval T, double x, int depth) {
  for (int n = 1; n <= depth; ++n) {
    x = map.value(x);
    if (T.contains(x)) return n;
  }
  return std::nullopt;
}

std::optional<Branch> domain_of(const SmoothMap& map, Interval T, double x, int depth) {
  const double c = require_turning_point(map);
  const auto all_laps = laps(map);
  const double critical_value = map.value(c);
  std::vector<double> pts{x};
  int n = 0;
  for (int i = 1; i <= depth; ++i) {
    pts.push_back(map.value(pts.back()));
    if (T.contains(pts.back())) {
      n = i;
      break;
    }
  }
  if (n == 0) return std::nullopt;
  Interval target = T;
  int sign = 1;
  for (int j = n - 1; j >= 0; --j) {
    const double p = pts[j];
    std::optional<Interval> left = lap_preimage(map, all_laps[0], target);
    std::optional<Interval> right = lap_preimage(map, all_laps[1], target);
    if (left && right && target.contains(critical_value)) {
      target = {left->lo, right->hi};
      sign = 0;
      continue;
    }
    const Lap& lap = lap_of(all_laps, p);
    const std::optional<Interval> piece = &lap == &all_laps[0] ? left : right;
    target = piece ? *piece : Interval{p, p};
    sign *= lap.direction;
  }
  Branch b;
  b.entry_time = n;
  b.domain = target;
  b.sign = sign;
  b.is_central = sign == 0 && target.contains(c);
  return b;
}

std::optional<Branch> central_domain(const SmoothMap& map, Interval T, int depth) {
  auto b = domain_of(map, T, require_turning_point(map), depth);
  if (b && !b->is_central) return std::nullopt;
  return b;
}

ReturnClassification classify_return(const SmoothMap& map, Interval T, const Branch& central) {
  const double c = require_turning_point(map);
  if (!central.is_central) throw Error(ErrorKind::argument, "branch is not central");
  const int k = central.entry_time;
  const double fc = iterate(map, c, k);
  const double fl = iterate(map, central.domain.lo, k);
  const double fr = iterate(map, central.domain.hi, k);
  ReturnClassification r;
  r.return_time = k;
  r.central_domain = central.domain;
  r.image = {std::min({fc, fl, fr}), std::max({fc, fl, fr})};
  r.kind = r.image.contains(c) ? ReturnKind::high : ReturnKind::low;
  r.centrality = central.domain.contains(fc) ? Centrality::central : Centrality::noncentral;
  r.ratio = central.domain.length() / T.length();
  return r;
}

ReturnClassification classify_return(const SmoothMap& map, const EntryMapDecomposition& decomp) {
  const Branch* central = central_branch(decomp);
  if (!central) throw Error(ErrorKind::no_central_domain, "no central domain within the computed depth");
  return classify_return(map, decomp.T.T, *central);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

RenormalizationVerdict is_renormalizable(const SmoothMap& map, const NiceInterval& T, int depth) {
  RenormalizationVerdict out;
  if (depth <= 0) return out;
  const Interval tt = T.T;
  const auto decomp = first_entry_decomposition(map, T, depth);
  bool any_return = false;
  for (const Branch& b : decomp.branches) {
    if (b.domain.lo >= tt.lo - kInteriorShrink && b.domain.hi <= tt.hi + kInteriorShrink) any_return = true;
  }
  const Branch* central = central_branch(decomp);
  if (central && central->domain.length() >= tt.length() * (1.0 - 1e-9)) {
    const ReturnClassification r = classify_return(map, tt, *central);
    out.period = r.return_time;
    out.image = r.image;
    const double tol = 1e-12 * std::max(1.0, tt.length());
    if (r.image.lo >= tt.lo - tol && r.image.hi <= tt.hi + tol) {
      out.verdict = Verdict::pass;
      out.restrictive_interval = tt;
    } else {
      out.verdict = Verdict::fail;
    }
    return out;
  }
  out.verdict = any_return ? Verdict::fail : Verdict::inconclusive;
  return out;
}

Branch extend_branch(const SmoothMap& map, Branch branch) {
  if (branch.is_central) throw Error(ErrorKind::precondition, "central branches fold and cannot be extended");
  const Interval ext = monotone_extension(map, branch.domain, branch.entry_time);
  branch.extended_domain = ext;
  branch.extended_range = Interval::spanning(iterate(map, ext.lo, branch.entry_time),
                                             iterate(map, ext.hi, branch.entry_time));
  return branch;
}

double scaled_factor(Interval W, Interval T) {
  if (!W.contains(T)) throw Error(ErrorKind::argument, "T is not contained in W");
  if (!(T.length() > 0.0)) throw Error(ErrorKind::argument, "T is degenerate");
  return std::min(T.lo - W.lo, W.hi - T.hi) / T.length();
}

Cascade central_cascade(const SmoothMap& map, const NiceInterval& T0, int count, int depth, int horizon) {
  Cascade out;
  if (count <= 0) {
    out.stop_reason = "empty request";
    return out;
  }
  out.levels.push_back(T0);
  std::vector<double> safe{T0.T.lo, T0.T.hi};
  while (true) {
    const Interval T = out.levels.back().T;
    const auto central = central_domain(map, T, depth);
    if (!central) {
      out.stop_reason = "no central domain within depth";
      break;
    }
    out.returns.push_back(classify_return(map, T, *central));
    if (static_cast<int>(out.levels.size()) >= count) {
      out.stop_reason = "requested length reached";
      break;
    }
    const Interval J = central->domain;
    if (J.length() >= T.length() * (1.0 - 1e-9)) {
      out.stop_reason = "central domain equals the interval (restrictive interval)";
      break;
    }
    const NicenessVerdict v = is_nice(map, J, horizon, safe);
    if (!v.pass) {
      out.stop_reason = "central domain failed the niceness check";
      break;
    }
    out.levels.push_back({J, horizon, std::isfinite(v.min_gap) ? v.min_gap : 0.0});
    safe.push_back(J.lo);
    safe.push_back(J.hi);
  }
  return out;
}

DerivativeBoundReport derivative_bound_check(const SmoothMap& map, const SplitInterval& s, int n, int grid) {
  if (n < 1) throw Error(ErrorKind::precondition, "iterate count must be at least 1");
  std::vector<SplitInterval> splits;
  try {
    splits = split_orbit(map, s, n);
  } catch (const FoldError& e) {
    throw Error(ErrorKind::precondition, std::string("not monotone on T: ") + e.what());
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (interiors_intersect(splits[i].J(), splits[j].J())) {
        std::ostringstream os;
        os << "orbit of J is not disjoint: iterates " << i << " and " << j << " meet";
        throw Error(ErrorKind::precondition, os.str());
      }
    }
  }
  const SplitInterval& image = splits.back();
  DerivativeBoundReport r;
  r.n = n;
  r.delta = std::min(image.minus_length(), image.plus_length()) / image.inner_length();
  const Interval J = s.J();
  double dmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid; ++k) {
    const double x = J.lo + J.length() * k / (grid - 1);
    dmin = std::min(dmin, std::abs(orbit(map, x, n).derivative_products.back()));
  }
  r.min_derivative = dmin;
  r.rhs = r.delta / (1.0 + r.delta) * image.inner_length() / s.inner_length();
  r.c_hat = dmin / r.rhs;
  return r;
}

std::vector<double> periodic_points(const SmoothMap& map, int period, int grid) {
  const Interval X = map.domain();
  auto g = [&](double x) { return iterate(map, x, period) - x; };
  std::vector<double> out;
  double prev_x = X.lo;
  double prev_g = g(prev_x);
  if (prev_g == 0.0) out.push_back(prev_x);
  for (int i = 1; i <= grid; ++i) {
    const double x = X.lo + X.length() * i / grid;
    const double gx = g(x);
    if (gx == 0.0) {
      out.push_back(x);
    } else if (prev_g != 0.0 && (gx > 0.0) != (prev_g > 0.0)) {
      const double root = bisect(g, prev_x, x);
      if (std::abs(g(root)) <= 1e-9) out.push_back(root);
    }
    prev_x = x;
    prev_g = gx;
  }
  return out;
}

double reversing_fixed_point(const SmoothMap& map) {
  for (const Lap& lap : laps(map)) {
    if (lap.direction > 0) continue;
    const double a = lap.interval.lo;
    const double b = lap.interval.hi;
    auto g = [&](double x) { return map.value(x) - x; };
    if ((g(a) > 0.0) != (g(b) > 0.0) || g(a) == 0.0 || g(b) == 0.0) return bisect(g, a, b);
  }
  throw Error(ErrorKind::construction_failed, "no fixed point on the decreasing lap");
}

}  // namespace unimodal
