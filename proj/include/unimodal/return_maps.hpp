#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unimodal/crossratio.hpp"
#include "unimodal/interval.hpp"
#include "unimodal/map_model.hpp"

namespace unimodal {

/// A symmetric interval around c whose boundary orbit avoids its interior,
/// verified up to `horizon` iterates (never proved).
struct NiceInterval {
  Interval T;
  int horizon = 0;
  /// min over checked iterates y of max(T.lo − y, y − T.hi); negative would
  /// mean the interior was entered.
  double boundary_orbit_min_gap = 0.0;
};

struct NicenessVerdict {
  bool pass = true;
  int failed_at = -1;        // iterate index of the first interior visit
  double min_gap = 0.0;
  bool shortcut = false;     // orbit closed up on a cycle or a known-safe point
};

/// Solutions of f(x) = y, one per lap where attained.
std::vector<double> preimages(const SmoothMap& map, double y);

/// Checks fⁱ(∂T) ∉ interior(T) for 1 ≤ i ≤ horizon, interior shrunk by 1e-12.
/// Orbits that land within 1e-8 of a point in `safe_points` (points whose own
/// orbits are already known to avoid the interior) or that close up on a cycle
/// to 1e-12 are accepted for the rest of the horizon.
NicenessVerdict is_nice(const SmoothMap& map, Interval T, int horizon,
                        std::span<const double> safe_points = {});

/// Nice interval bounded by the periodic point nearest c and its symmetric point.
NiceInterval nice_from_periodic(const SmoothMap& map, double p, int period, int horizon);

struct Branch {
  int entry_time = 0;
  Interval domain;
  int sign = 0;  // direction of fⁿ on the domain, 0 for the folding central branch
  bool is_central = false;
  std::optional<Interval> extended_domain;
  std::optional<Interval> extended_range;
};

struct EntryMapDecomposition {
  NiceInterval T;
  int depth = 0;
  std::vector<Branch> branches;  // sorted by domain
  double uncovered_measure = 0.0;
  bool partial = false;          // interval budget exhausted before `depth`
};

struct DecompositionOptions {
  std::size_t max_intervals = 200000;
  double min_length = 1e-13;
};

EntryMapDecomposition first_entry_decomposition(const SmoothMap& map, const NiceInterval& T, int depth,
                                                DecompositionOptions options = {});

const Branch* central_branch(const EntryMapDecomposition& decomp);
const Branch* branch_containing(const EntryMapDecomposition& decomp, double x);

/// First entry time of x into T (closed), 0 < n ≤ depth.
std::optional<int> entry_time(const SmoothMap& map, Interval T, double x, int depth);

/// Domain of the first entry map to T containing x, by pulling T back along
/// the orbit of x.
std::optional<Branch> domain_of(const SmoothMap& map, Interval T, double x, int depth);

/// Central domain of T (the domain containing c), if c enters T within depth.
std::optional<Branch> central_domain(const SmoothMap& map, Interval T, int depth);

enum class ReturnKind { high, low };
enum class Centrality { central, noncentral };

struct ReturnClassification {
  ReturnKind kind = ReturnKind::low;
  Centrality centrality = Centrality::noncentral;
  double ratio = 0.0;  // |J| / |T|
  int return_time = 0;
  Interval central_domain;
  Interval image;      // fᵏ(J)
};

ReturnClassification classify_return(const SmoothMap& map, Interval T, const Branch& central);
ReturnClassification classify_return(const SmoothMap& map, const EntryMapDecomposition& decomp);

enum class Verdict { pass, fail, inconclusive };

const char* to_string(Verdict v);

struct RenormalizationVerdict {
  Verdict verdict = Verdict::inconclusive;
  std::optional<Interval> restrictive_interval;
  int period = 0;
  std::optional<Interval> image;  // f^period(T)
};

RenormalizationVerdict is_renormalizable(const SmoothMap& map, const NiceInterval& T, int depth);

/// Fills the maximal monotone extension V′ ⊇ V of fⁿ and its range.
Branch extend_branch(const SmoothMap& map, Branch branch);

/// min(|left margin|, |right margin|) / |T| for T ⊆ W.
double scaled_factor(Interval W, Interval T);

struct Cascade {
  std::vector<NiceInterval> levels;
  /// classification of level i's first entry map, when its central domain exists
  std::vector<ReturnClassification> returns;
  std::string stop_reason;
};

/// T′₀ = T0 and T′ᵢ₊₁ = central domain of T′ᵢ, up to `count` levels.
Cascade central_cascade(const SmoothMap& map, const NiceInterval& T0, int count, int depth, int horizon = 10000);

struct DerivativeBoundReport {
  int n = 0;
  double delta = 0.0;
  double min_derivative = 0.0;
  double rhs = 0.0;    // δ/(1+δ)·|fⁿ(J)|/|J|, i.e. the bound with C₆ = 1
  double c_hat = 0.0;  // min|Dfⁿ| / rhs
};

/// Lower derivative bound on J ⊂ T for a monotone fⁿ|T with disjoint orbit of J.
DerivativeBoundReport derivative_bound_check(const SmoothMap& map, const SplitInterval& s, int n,
                                             int grid = 1000);

/// Solutions of fᵖ(x) = x found by sign changes on a grid and bisection.
std::vector<double> periodic_points(const SmoothMap& map, int period, int grid = 1 << 14);

/// The fixed point on the decreasing lap (the one whose nice interval roots a cascade).
double reversing_fixed_point(const SmoothMap& map);

}  // namespace unimodal
