#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "unimodal/map_model.hpp"
#include "unimodal/return_maps.hpp"

namespace unimodal::verify {

/// Seeded generator with platform-independent draws (std distributions are
/// implementation-defined, so they are not used).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// exp of a uniform draw in [log lo, log hi).
  double log_uniform(double lo, double hi);
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);

 private:
  std::mt19937_64 engine_;
};

/// Ascending coefficients of h(x) = x + s·x(1 − x)(x − 1/2), increasing on [0, 1] for 0 ≤ s < 2.
std::vector<double> cubic_bump_diffeo(double strength);

/// g = h∘f∘h⁻¹ with h = cubic_bump_diffeo(strength).
MapSpec conjugated_test_family(const MapSpec& base, double strength = 1.0);

// ---------------------------------------------------------------------------
// Periodic attractors

struct PeriodicOrbit {
  std::vector<double> points;
  double multiplier = 0.0;
  int period() const { return static_cast<int>(points.size()); }
};

struct AttractorOptions {
  int grid = 1000;
  int transient = 3000;
  int max_period = 32;
  double neutral_tolerance = 1e-6;
};

struct AttractorSurvey {
  std::vector<PeriodicOrbit> attracting;
  std::vector<PeriodicOrbit> neutral;
  /// Immediate basin components, one per attracting orbit point.
  std::vector<Interval> basins;
  /// Bisection width of the basin boundaries.
  double basin_resolution = 0.0;
  /// False when some basin boundary search did not settle.
  bool conclusive = true;
};

/// Attracting and neutral cycles of period ≤ max_period reached from a grid of
/// starting points, Newton-polished, with approximate immediate basins.
AttractorSurvey survey_attractors(const SmoothMap& map, AttractorOptions options = {});

bool meets_basins(const AttractorSurvey& survey, Interval i);

// ---------------------------------------------------------------------------
// Reports

struct Report {
  std::string experiment;
  nlohmann::json map;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json fitted = nlohmann::json::object();
  std::optional<Interval> certified_Z;
  long violations = 0;
  nlohmann::json worst_witness = nullptr;
  std::optional<double> runtime_ms;
  bool pass = false;
  nlohmann::json details = nlohmann::json::object();
  std::vector<std::string> csv_header;
  std::vector<std::vector<double>> csv_rows;
};

nlohmann::json to_json(const Report& r);
std::string to_csv(const Report& r);

// ---------------------------------------------------------------------------
// Negative Schwarzian of first entries near the critical value

struct TheoremAOptions {
  int samples = 100000;
  int max_entry = 200;
  int horizon = 10000;
  double initial_fraction = 0.2;  // first Z has width initial_fraction·|X|
  double min_width = 1e-6;
  long min_entries = 10000;
  int schwarzian_grid = 100000;
  std::uint64_t seed = 1;
};

struct EntryWitness {
  double x = 0.0;
  int n = 0;
  double image = 0.0;  // fⁿ(x)
  double schwarzian = 0.0;
};

struct ZLevel {
  double width = 0.0;
  long entries = 0;
  double max_schwarzian = 0.0;
  EntryWitness worst;
  bool pass = false;
};

struct TheoremAResult {
  double max_map_schwarzian = 0.0;  // max Sf over the dense grid
  double argmax = 0.0;
  double critical_min_return = 0.0;  // min over i ≤ horizon of |fⁱ(c) − c|
  long excluded = 0;                 // orbits truncated near c or by overflow
  std::vector<ZLevel> levels;
  std::optional<std::size_t> certified;  // index into levels
  long rechecked = 0;
  long recheck_failures = 0;
  std::vector<std::vector<double>> rows;

  bool non_vacuous() const { return max_map_schwarzian > 0.0; }
  std::optional<Interval> certified_Z(double critical_value) const;
};

/// Throws an inapplicable error when the critical point is periodic to the horizon.
TheoremAResult verify_theorem_a(const MapSpec& map, const TheoremAOptions& options);
Report report(const MapSpec& map, const TheoremAOptions& options, const TheoremAResult& result);

// ---------------------------------------------------------------------------
// Cross-ratio lower bound exp(−C₂|fⁿM|²)

struct TheoremBOptions {
  int samples = 20000;  // base budget; 2·samples are drawn for stability and held-out checks
  int max_n = 200;
  double min_radius = 1e-6;  // fractions of |X|
  double max_radius = 0.1;
  double min_margin = 0.05;  // margins at least this fraction of |M|
  double stability = 0.2;
  double holdout_margin = 1.2;
  double rounding_floor = 1e-10;  // −log A below this counts as A ≥ 1
  AttractorOptions attractors;
  std::uint64_t seed = 1;
};

struct CrossRatioSample {
  double x = 0.0;
  int n = 0;
  Interval M;
  Interval J;
  double image_length = 0.0;
  double log_A = 0.0;
  double log_B = 0.0;
  double sum_margin_products = 0.0;
  double sum_squares = 0.0;
};

struct TheoremBFit {
  double C2_A = 0.0;
  double C2_B = 0.0;
  double C1_A = 0.0;  // inf log A / Σ|fⁱM⁻||fⁱM⁺|
  double C1_B = 0.0;  // inf log B / Σ|fⁱM|²
  long samples = 0;
  long A_at_least_one = 0;
  long B_at_least_one = 0;
  std::optional<CrossRatioSample> worst;
};

struct TheoremBResult {
  AttractorSurvey survey;
  TheoremBFit base;     // first half
  TheoremBFit doubled;  // all samples
  double change_A = 0.0;
  double change_B = 0.0;
  long holdout_violations = 0;
  long rejected_basin = 0;
  long rejected_other = 0;
  long rechecked = 0;
  long recheck_failures = 0;
  std::vector<CrossRatioSample> samples;

  bool stable(double tolerance) const { return change_A <= tolerance && change_B <= tolerance; }
};

TheoremBResult verify_theorem_b(const MapSpec& map, const TheoremBOptions& options);
Report report(const MapSpec& map, const TheoremBOptions& options, const TheoremBResult& result);

/// Relative change |b − a|/a, 0 when both vanish and +inf when only a does.
double relative_change(double a, double b);

// ---------------------------------------------------------------------------
// Cross-ratio bound along orbits that stay in first-entry domains

struct TheoremCOptions {
  double K = 0.99;
  int levels = 6;
  int samples_per_level = 1000;
  int max_n = 50;
  int depth = 200;
  int horizon = 10000;
  long min_samples = 100;
  std::uint64_t seed = 1;
};

struct TheoremCLevel {
  Interval T;
  long samples = 0;
  long rejected = 0;
  double min_A = 0.0;
  double min_B = 0.0;
  std::optional<CrossRatioSample> worst;
  bool pass = false;
};

struct TheoremCResult {
  std::vector<TheoremCLevel> levels;
  std::string cascade_stop;  // why the cascade search ended, independent of sampling
  int cascade_length = 0;
  std::optional<int> passing_level;
  long rechecked = 0;
  long recheck_failures = 0;
  std::vector<std::vector<double>> rows;
};

/// The maximal interval P ∋ x on which fⁿ is monotone and every fⁱ(P),
/// i ≤ n, stays inside the first-entry domain of fⁱ(x) for T.
std::optional<Interval> domain_orbit_interval(const SmoothMap& map, Interval T, double x, int n, int depth);

TheoremCResult verify_theorem_c(const MapSpec& map, const TheoremCOptions& options);
Report report(const MapSpec& map, const TheoremCOptions& options, const TheoremCResult& result);

/// Nice interval bounded by the reversing fixed point and its symmetric point.
NiceInterval fixed_point_nice_interval(const MapSpec& map, int horizon);

// ---------------------------------------------------------------------------
// Envelope of max|fⁱV| against |fⁿV|

struct Tau1Options {
  int samples = 100000;
  int max_n = 200;
  double min_radius = 1e-6;
  double max_radius = 0.1;
  double small_bin = 1e-3;
  AttractorOptions attractors;
  std::uint64_t seed = 1;
};

struct EnvelopeStep {
  double image_length;  // |fⁿV|
  double envelope;      // max|fⁱV| over samples with |fⁿV| ≤ image_length
};

struct Tau1Result {
  std::vector<std::pair<double, double>> scatter;  // (|fⁿV|, maxᵢ≤ₙ|fⁱV|)
  std::vector<EnvelopeStep> envelope;
  std::optional<double> small_bin_value;
  long rejected_basin = 0;
};

/// Running maximum over the scatter sorted by |fⁿV|.
std::vector<EnvelopeStep> monotone_envelope(std::vector<std::pair<double, double>> scatter);

Tau1Result estimate_tau1(const MapSpec& map, const Tau1Options& options);
Report report(const MapSpec& map, const Tau1Options& options, const Tau1Result& result);

// ---------------------------------------------------------------------------
// Central-domain ratio along a cascade

struct ProbeOptions {
  int levels = 5;
  int depth = 200;
  int horizon = 10000;
};

struct ProbeResult {
  std::vector<ReturnClassification> returns;
  std::string cascade_stop;
  std::optional<double> max_noncentral_low_ratio;
};

ProbeResult probe_central_ratio(const MapSpec& map, const ProbeOptions& options);
Report report(const MapSpec& map, const ProbeOptions& options, const ProbeResult& result);

// ---------------------------------------------------------------------------
// Lower derivative bound on J ⊂ T with disjoint orbit of J

struct DerivativeBoundOptions {
  int samples = 1000;  // base budget; doubled for the stability check
  int max_n = 12;
  int grid = 1000;
  double min_radius = 1e-4;
  double max_radius = 0.1;
  double min_margin = 0.05;
  double stability = 0.1;
  std::uint64_t seed = 1;
};

struct DerivativeBoundResult {
  double c_hat_base = 0.0;     // inf ĉ over the first half
  double c_hat_doubled = 0.0;  // inf ĉ over all samples
  double change = 0.0;
  long samples = 0;
  long nonpositive = 0;
  long rejected = 0;
  std::optional<DerivativeBoundReport> worst;
  double worst_x = 0.0;
  std::vector<std::vector<double>> rows;

  bool pass(double tolerance) const { return nonpositive == 0 && change < tolerance; }
};

DerivativeBoundResult fit_derivative_bound(const MapSpec& map, const DerivativeBoundOptions& options);
Report report(const MapSpec& map, const DerivativeBoundOptions& options, const DerivativeBoundResult& result);

// ---------------------------------------------------------------------------
// Config-driven runs

struct RunOutcome {
  int exit_code = 0;
  std::vector<Report> reports;
  std::vector<std::string> errors;
};

/// Executes {"seed", "experiments": [{"type", "map", ...}]} and writes one JSON
/// report (and a CSV when there are samples) per experiment into out_dir.
/// Exit code 0 when all required experiments pass, 1 when one fails, 2 on a
/// malformed config. Relative "map_file" paths resolve against base_dir;
/// run_file passes the directory of the config file.
RunOutcome run(const nlohmann::json& config, const std::string& out_dir, bool timing = false,
               const std::string& base_dir = "");
RunOutcome run_file(const std::string& config_path, const std::string& out_dir, bool timing = false);

/// Serialization used for report files: two-space indent, trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace unimodal::verify
