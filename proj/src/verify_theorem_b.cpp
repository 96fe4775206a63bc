#include <algorithm>
#include <cmath>
#include <limits>

#include "unimodal/crossratio.hpp"
#include "unimodal/error.hpp"
#include "unimodal/map_io.hpp"
#include "unimodal/verify.hpp"

namespace unimodal::verify {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Rejection { none, basin, other };

struct Draw {
  Rejection rejection = Rejection::other;
  CrossRatioSample sample;
  std::vector<SplitInterval> splits;
};

// M = [x − r, x + r] ∩ X with log-uniform r, n ≤ monotone depth, J with margins ≥ min_margin·|M|.
Draw draw(const MapSpec& map, Rng& rng, const AttractorSurvey& survey, double min_radius, double max_radius,
          double min_margin, int max_n) {
  Draw d;
  const Interval X = map.domain();
  const double x = X.lo + X.length() * rng.uniform();
  const double r = X.length() * rng.log_uniform(min_radius, max_radius);
  double u1 = rng.uniform(min_margin, 1.0 - min_margin);
  double u2 = rng.uniform(min_margin, 1.0 - min_margin);
  if (u1 > u2) std::swap(u1, u2);
  const Interval M{std::max(X.lo, x - r), std::min(X.hi, x + r)};
  if (!(M.length() > 0.0)) return d;
  const int depth = monotone_depth(map, M, max_n);
  if (depth < 1) return d;
  const int n = rng.uniform_int(1, depth);
  const double L = M.length();
  try {
    d.splits = split_orbit(map, SplitInterval(M.lo, 1, u1 * L, (u2 - u1) * L, (1.0 - u2) * L), n);
  } catch (const Error&) {
    return d;
  }
  const SplitInterval& img = d.splits.back();
  if (meets_basins(survey, img.M())) {
    d.rejection = Rejection::basin;
    return d;
  }
  const CrossRatios before = cross_ratios(d.splits.front());
  const CrossRatios after = cross_ratios(img);
  CrossRatioSample& s = d.sample;
  s.x = x;
  s.n = n;
  s.M = M;
  s.J = d.splits.front().J();
  s.image_length = img.length();
  s.log_A = std::log(after.a / before.a);
  s.log_B = std::log(after.b / before.b);
  for (int i = 0; i < n; ++i) {
    s.sum_margin_products += d.splits[i].minus_length() * d.splits[i].plus_length();
    s.sum_squares += d.splits[i].length() * d.splits[i].length();
  }
  d.rejection = Rejection::none;
  return d;
}

// fⁿ strictly monotone on M, checked on sample points by plain iteration.
bool monotone_by_sampling(const SmoothMap& map, Interval M, int n) {
  constexpr int kPoints = 64;
  int direction = 0;
  double prev = iterate(map, M.lo, n);
  for (int k = 1; k <= kPoints; ++k) {
    const double v = iterate(map, M.lo + M.length() * k / kPoints, n);
    const int dir = v > prev ? 1 : (v < prev ? -1 : 0);
    if (dir != 0) {
      if (direction != 0 && dir != direction) return false;
      direction = dir;
    }
    prev = v;
  }
  return true;
}

void accumulate(TheoremBFit& fit, const CrossRatioSample& s, double floor) {
  ++fit.samples;
  const double L2 = s.image_length * s.image_length;
  const double ex_A = -s.log_A;
  const double ex_B = -s.log_B;
  if (ex_A <= floor) ++fit.A_at_least_one;
  if (ex_B <= floor) ++fit.B_at_least_one;
  const double cA = ex_A > floor ? ex_A / L2 : 0.0;
  const double cB = ex_B > floor ? ex_B / L2 : 0.0;
  const double worst_now = fit.worst ? std::max(-fit.worst->log_A, -fit.worst->log_B) /
                                           (fit.worst->image_length * fit.worst->image_length)
                                     : -kInf;
  if (std::max(ex_A, ex_B) / L2 > worst_now) fit.worst = s;
  fit.C2_A = std::max(fit.C2_A, cA);
  fit.C2_B = std::max(fit.C2_B, cB);
  if (s.sum_margin_products > 0.0) fit.C1_A = std::min(fit.C1_A, s.log_A / s.sum_margin_products);
  if (s.sum_squares > 0.0) fit.C1_B = std::min(fit.C1_B, s.log_B / s.sum_squares);
}

json sample_json(const CrossRatioSample& s) {
  return {{"x", s.x},
          {"n", s.n},
          {"M", interval_to_json(s.M)},
          {"J", interval_to_json(s.J)},
          {"image_length", s.image_length},
          {"log_A", s.log_A},
          {"log_B", s.log_B}};
}

json fit_json(const TheoremBFit& f) {
  return {{"C2_A", f.C2_A},
          {"C2_B", f.C2_B},
          {"C1_A", std::isfinite(f.C1_A) ? json(f.C1_A) : json(nullptr)},
          {"C1_B", std::isfinite(f.C1_B) ? json(f.C1_B) : json(nullptr)},
          {"samples", f.samples},
          {"A_at_least_one", f.A_at_least_one},
          {"B_at_least_one", f.B_at_least_one}};
}

json survey_json(const AttractorSurvey& s) {
  auto cycles = [](const std::vector<PeriodicOrbit>& v) {
    json a = json::array();
    for (const PeriodicOrbit& o : v) a.push_back({{"points", o.points}, {"multiplier", o.multiplier}});
    return a;
  };
  json basins = json::array();
  for (const Interval& b : s.basins) basins.push_back(interval_to_json(b));
  return {{"attracting", cycles(s.attracting)},
          {"neutral", cycles(s.neutral)},
          {"basins", basins},
          {"basin_resolution", s.basin_resolution},
          {"conclusive", s.conclusive}};
}

std::vector<double> sample_row(const CrossRatioSample& s) {
  return {s.x, static_cast<double>(s.n), s.M.lo, s.M.hi, s.J.lo, s.J.hi, s.image_length,
          s.log_A, s.log_B, s.sum_margin_products, s.sum_squares};
}

}  // namespace

TheoremBResult verify_theorem_b(const MapSpec& map, const TheoremBOptions& options) {
  TheoremBResult out;
  out.survey = survey_attractors(map, options.attractors);
  out.base.C1_A = out.base.C1_B = kInf;
  out.doubled.C1_A = out.doubled.C1_B = kInf;
  Rng rng(options.seed);
  const long total = 2L * options.samples;
  const long max_attempts = 50 * total;
  for (long attempt = 0; attempt < max_attempts && static_cast<long>(out.samples.size()) < total; ++attempt) {
    Draw d = draw(map, rng, out.survey, options.min_radius, options.max_radius, options.min_margin, options.max_n);
    if (d.rejection == Rejection::basin) ++out.rejected_basin;
    if (d.rejection == Rejection::other) ++out.rejected_other;
    if (d.rejection != Rejection::none) continue;
    const long index = static_cast<long>(out.samples.size());
    if (index % 100 == 0) {
      ++out.rechecked;
      const Interval image = Interval::spanning(iterate(map, d.sample.M.lo, d.sample.n),
                                                iterate(map, d.sample.M.hi, d.sample.n));
      if (!monotone_by_sampling(map, d.sample.M, d.sample.n) || meets_basins(out.survey, image)) {
        ++out.recheck_failures;
      }
    }
    out.samples.push_back(d.sample);
  }
  const long half = std::min<long>(options.samples, static_cast<long>(out.samples.size()));
  for (long i = 0; i < static_cast<long>(out.samples.size()); ++i) {
    if (i < half) accumulate(out.base, out.samples[i], options.rounding_floor);
    accumulate(out.doubled, out.samples[i], options.rounding_floor);
  }
  for (long i = half; i < static_cast<long>(out.samples.size()); ++i) {
    const CrossRatioSample& s = out.samples[i];
    const double L2 = s.image_length * s.image_length;
    if (-s.log_A > options.holdout_margin * out.base.C2_A * L2 + options.rounding_floor ||
        -s.log_B > options.holdout_margin * out.base.C2_B * L2 + options.rounding_floor) {
      ++out.holdout_violations;
    }
  }
  out.change_A = relative_change(out.base.C2_A, out.doubled.C2_A);
  out.change_B = relative_change(out.base.C2_B, out.doubled.C2_B);
  return out;
}

Report report(const MapSpec& map, const TheoremBOptions& options, const TheoremBResult& result) {
  Report r;
  r.experiment = "theorem_b";
  r.map = map_to_json(map);
  r.params = {{"samples", options.samples},
              {"max_n", options.max_n},
              {"min_radius", options.min_radius},
              {"max_radius", options.max_radius},
              {"min_margin", options.min_margin},
              {"stability", options.stability},
              {"holdout_margin", options.holdout_margin},
              {"rounding_floor", options.rounding_floor},
              {"seed", options.seed}};
  r.fitted = fit_json(result.base);
  r.fitted["doubled"] = fit_json(result.doubled);
  r.fitted["change_A"] = std::isfinite(result.change_A) ? json(result.change_A) : json(nullptr);
  r.fitted["change_B"] = std::isfinite(result.change_B) ? json(result.change_B) : json(nullptr);
  r.violations = result.holdout_violations;
  if (result.doubled.worst) r.worst_witness = sample_json(*result.doubled.worst);
  r.pass = result.stable(options.stability) && result.holdout_violations == 0 && result.recheck_failures == 0 &&
           result.base.samples > 0;
  r.details = {{"attractors", survey_json(result.survey)},
               {"neutral_flagged", !result.survey.neutral.empty()},
               {"rejected_basin", result.rejected_basin},
               {"rejected_other", result.rejected_other},
               {"rechecked", result.rechecked},
               {"recheck_failures", result.recheck_failures}};
  r.csv_header = {"x", "n", "M_lo", "M_hi", "J_lo", "J_hi", "image_length", "log_A", "log_B",
                  "sum_margin_products", "sum_squares"};
  for (const CrossRatioSample& s : result.samples) r.csv_rows.push_back(sample_row(s));
  return r;
}

// ---------------------------------------------------------------------------

std::vector<EnvelopeStep> monotone_envelope(std::vector<std::pair<double, double>> scatter) {
  std::sort(scatter.begin(), scatter.end());
  std::vector<EnvelopeStep> out;
  double running = -kInf;
  for (const auto& [y, m] : scatter) {
    if (m > running) {
      running = m;
      out.push_back({y, running});
    }
  }
  return out;
}

Tau1Result estimate_tau1(const MapSpec& map, const Tau1Options& options) {
  Tau1Result out;
  const AttractorSurvey survey = survey_attractors(map, options.attractors);
  Rng rng(options.seed);
  for (int k = 0; k < options.samples; ++k) {
    Draw d = draw(map, rng, survey, options.min_radius, options.max_radius, 1.0 / 3.0, options.max_n);
    if (d.rejection == Rejection::basin) ++out.rejected_basin;
    if (d.rejection != Rejection::none) continue;
    double widest = 0.0;
    for (const SplitInterval& s : d.splits) widest = std::max(widest, s.length());
    out.scatter.emplace_back(d.splits.back().length(), widest);
  }
  out.envelope = monotone_envelope(out.scatter);
  for (const auto& [y, m] : out.scatter) {
    if (y < options.small_bin) out.small_bin_value = std::max(out.small_bin_value.value_or(0.0), m);
  }
  return out;
}

Report report(const MapSpec& map, const Tau1Options& options, const Tau1Result& result) {
  Report r;
  r.experiment = "tau1";
  r.map = map_to_json(map);
  r.params = {{"samples", options.samples},
              {"max_n", options.max_n},
              {"min_radius", options.min_radius},
              {"max_radius", options.max_radius},
              {"small_bin", options.small_bin},
              {"seed", options.seed}};
  json env = json::array();
  for (const EnvelopeStep& s : result.envelope) env.push_back({s.image_length, s.envelope});
  r.fitted = {{"small_bin_value", result.small_bin_value ? json(*result.small_bin_value) : json(nullptr)},
              {"samples", static_cast<long>(result.scatter.size())}};
  r.pass = true;
  r.details = {{"envelope", env}, {"rejected_basin", result.rejected_basin}};
  r.csv_header = {"image_length", "max_length"};
  for (const auto& [y, m] : result.scatter) r.csv_rows.push_back({y, m});
  return r;
}

}  // namespace unimodal::verify
