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

// Orbit of x until the first visit to T after time n, or empty when that
// takes longer than depth further steps.
std::vector<double> orbit_to_entry(const SmoothMap& map, Interval T, double x, int n, int depth) {
  std::vector<double> pts{x};
  for (int t = 1; t <= n + depth; ++t) {
    pts.push_back(map.value(pts.back()));
    if (t > n && T.contains(pts.back())) return pts;
  }
  return {};
}

json cr_sample_json(const CrossRatioSample& s) {
  return {{"x", s.x},
          {"n", s.n},
          {"M", interval_to_json(s.M)},
          {"J", interval_to_json(s.J)},
          {"image_length", s.image_length},
          {"log_A", s.log_A},
          {"log_B", s.log_B}};
}

}  // namespace

std::optional<Interval> domain_orbit_interval(const SmoothMap& map, Interval T, double x, int n, int depth) {
  const auto pts = orbit_to_entry(map, T, x, n, depth);
  if (pts.empty()) return std::nullopt;
  const auto all_laps = laps(map);
  const Interval X = map.domain();
  const double c = *map.turning_point();
  Interval q = T;
  for (int j = static_cast<int>(pts.size()) - 2; j >= 0; --j) {
    const double p = pts[j];
    if (p == c) return std::nullopt;
    const Lap& lap = all_laps.size() == 1 || p < c ? all_laps[0] : all_laps[1];
    const auto pre = lap_preimage(map, lap, q);
    if (!pre) return std::nullopt;
    Interval next = *pre;
    if (j >= 1) {
      const Interval allowed = T.contains(p) ? T : (p < T.lo ? Interval{X.lo, T.lo} : Interval{T.hi, X.hi});
      next = {std::max(next.lo, allowed.lo), std::min(next.hi, allowed.hi)};
    }
    if (!(next.length() > 0.0) || !next.contains(p)) return std::nullopt;
    q = next;
  }
  return q;
}

TheoremCResult verify_theorem_c(const MapSpec& map, const TheoremCOptions& options) {
  TheoremCResult out;
  const NiceInterval T0 = fixed_point_nice_interval(map, options.horizon);
  const Cascade cascade = central_cascade(map, T0, options.levels, options.depth, options.horizon);
  out.cascade_stop = cascade.stop_reason;
  out.cascade_length = static_cast<int>(cascade.levels.size());
  const Interval X = map.domain();
  Rng rng(options.seed);
  for (std::size_t level = 0; level < cascade.levels.size(); ++level) {
    TheoremCLevel lv;
    lv.T = cascade.levels[level].T;
    lv.min_A = lv.min_B = kInf;
    const long max_attempts = 20L * options.samples_per_level;
    for (long attempt = 0; attempt < max_attempts && lv.samples < options.samples_per_level; ++attempt) {
      const double x = X.lo + X.length() * rng.uniform();
      const int n = rng.uniform_int(1, options.max_n);
      const double u = rng.uniform(0.5, 1.0);
      const double v = rng.uniform(0.5, 1.0);
      double u1 = rng.uniform(0.05, 0.95);
      double u2 = rng.uniform(0.05, 0.95);
      if (u1 > u2) std::swap(u1, u2);
      const auto P = domain_orbit_interval(map, lv.T, x, n, options.depth);
      if (!P) {
        ++lv.rejected;
        continue;
      }
      const Interval M{x - u * (x - P->lo), x + v * (P->hi - x)};
      const double L = M.length();
      DistortionResult dr{1.0, 1.0, SplitInterval(0.0, 1, 1.0, 1.0, 1.0)};
      try {
        dr = distortion(map, n, SplitInterval(M.lo, 1, u1 * L, (u2 - u1) * L, (1.0 - u2) * L));
      } catch (const Error&) {
        ++lv.rejected;
        continue;
      }
      CrossRatioSample s;
      s.x = x;
      s.n = n;
      s.M = M;
      s.J = {M.lo + u1 * L, M.lo + u2 * L};
      s.image_length = dr.image_split.length();
      s.log_A = std::log(dr.A);
      s.log_B = std::log(dr.B);
      if (std::min(dr.A, dr.B) < std::min(lv.min_A, lv.min_B)) lv.worst = s;
      lv.min_A = std::min(lv.min_A, dr.A);
      lv.min_B = std::min(lv.min_B, dr.B);
      if (lv.samples % 100 == 0) {
        // Points of M must visit T at exactly the times x does, up to n.
        ++out.rechecked;
        const auto ref = orbit_to_entry(map, lv.T, x, n, options.depth);
        bool ok = true;
        for (int k = 0; k <= 16 && ok; ++k) {
          double z = M.lo + L * k / 16;
          for (int t = 1; t <= n && ok; ++t) {
            z = map.value(z);
            const bool x_in = lv.T.contains(ref[t]);
            const bool deep_in = z > lv.T.lo + 1e-9 && z < lv.T.hi - 1e-9;
            const bool far_out = z < lv.T.lo - 1e-9 || z > lv.T.hi + 1e-9;
            if ((x_in && far_out) || (!x_in && deep_in)) ok = false;
          }
        }
        if (!ok) ++out.recheck_failures;
      }
      out.rows.push_back({static_cast<double>(level), x, static_cast<double>(n), M.lo, M.hi, s.J.lo, s.J.hi,
                          s.image_length, dr.A, dr.B});
      ++lv.samples;
    }
    lv.pass = lv.samples >= options.min_samples && std::min(lv.min_A, lv.min_B) > options.K;
    out.levels.push_back(lv);
    if (lv.pass) {
      out.passing_level = static_cast<int>(level);
      break;
    }
  }
  return out;
}

Report report(const MapSpec& map, const TheoremCOptions& options, const TheoremCResult& result) {
  Report r;
  r.experiment = "theorem_c";
  r.map = map_to_json(map);
  r.params = {{"K", options.K},
              {"levels", options.levels},
              {"samples_per_level", options.samples_per_level},
              {"max_n", options.max_n},
              {"depth", options.depth},
              {"horizon", options.horizon},
              {"min_samples", options.min_samples},
              {"seed", options.seed}};
  json levels = json::array();
  double best = -kInf;
  const TheoremCLevel* best_level = nullptr;
  for (const TheoremCLevel& l : result.levels) {
    const double m = l.samples ? std::min(l.min_A, l.min_B) : -kInf;
    levels.push_back({{"T", interval_to_json(l.T)},
                      {"samples", l.samples},
                      {"rejected", l.rejected},
                      {"min_A", l.samples ? json(l.min_A) : json(nullptr)},
                      {"min_B", l.samples ? json(l.min_B) : json(nullptr)},
                      {"pass", l.pass}});
    if (m > best) {
      best = m;
      best_level = &l;
    }
    if (l.samples && std::min(l.min_A, l.min_B) <= options.K) ++r.violations;
  }
  const TheoremCLevel* shown = result.passing_level ? &result.levels[*result.passing_level] : best_level;
  if (result.passing_level) {
    r.fitted = {{"level", *result.passing_level}, {"min_A", shown->min_A}, {"min_B", shown->min_B}};
  } else {
    r.fitted = {{"level", nullptr}, {"best_min", std::isfinite(best) ? json(best) : json(nullptr)}};
  }
  if (shown && shown->worst) r.worst_witness = cr_sample_json(*shown->worst);
  r.pass = result.passing_level.has_value() && result.recheck_failures == 0;
  r.details = {{"levels", levels},
               {"cascade_stop", result.cascade_stop},
               {"cascade_length", result.cascade_length},
               {"rechecked", result.rechecked},
               {"recheck_failures", result.recheck_failures}};
  r.csv_header = {"level", "x", "n", "M_lo", "M_hi", "J_lo", "J_hi", "image_length", "A", "B"};
  r.csv_rows = result.rows;
  return r;
}

// ---------------------------------------------------------------------------

ProbeResult probe_central_ratio(const MapSpec& map, const ProbeOptions& options) {
  ProbeResult out;
  if (options.levels <= 0) return out;
  const NiceInterval T0 = fixed_point_nice_interval(map, options.horizon);
  const Cascade cascade = central_cascade(map, T0, options.levels, options.depth, options.horizon);
  out.returns = cascade.returns;
  out.cascade_stop = cascade.stop_reason;
  for (const ReturnClassification& rc : out.returns) {
    if (rc.kind == ReturnKind::low && rc.centrality == Centrality::noncentral) {
      out.max_noncentral_low_ratio = std::max(out.max_noncentral_low_ratio.value_or(0.0), rc.ratio);
    }
  }
  return out;
}

Report report(const MapSpec& map, const ProbeOptions& options, const ProbeResult& result) {
  Report r;
  r.experiment = "probe_central_ratio";
  r.map = map_to_json(map);
  r.params = {{"levels", options.levels}, {"depth", options.depth}, {"horizon", options.horizon}};
  json levels = json::array();
  for (const ReturnClassification& rc : result.returns) {
    levels.push_back({{"kind", rc.kind == ReturnKind::high ? "high" : "low"},
                      {"centrality", rc.centrality == Centrality::central ? "central" : "noncentral"},
                      {"ratio", rc.ratio},
                      {"return_time", rc.return_time},
                      {"central_domain", interval_to_json(rc.central_domain)}});
    r.csv_rows.push_back({rc.kind == ReturnKind::high ? 1.0 : 0.0, rc.centrality == Centrality::central ? 1.0 : 0.0,
                          rc.ratio, static_cast<double>(rc.return_time)});
  }
  r.fitted = {{"tau5", result.max_noncentral_low_ratio ? json(*result.max_noncentral_low_ratio) : json(nullptr)}};
  r.pass = true;
  r.details = {{"levels", levels}, {"cascade_stop", result.cascade_stop}};
  r.csv_header = {"high", "central", "ratio", "return_time"};
  return r;
}

// ---------------------------------------------------------------------------

DerivativeBoundResult fit_derivative_bound(const MapSpec& map, const DerivativeBoundOptions& options) {
  DerivativeBoundResult out;
  out.c_hat_base = out.c_hat_doubled = kInf;
  const Interval X = map.domain();
  Rng rng(options.seed);
  const long total = 2L * options.samples;
  for (long attempt = 0; attempt < 50 * total && out.samples < total; ++attempt) {
    const double x = X.lo + X.length() * rng.uniform();
    const double r = X.length() * rng.log_uniform(options.min_radius, options.max_radius);
    double u1 = rng.uniform(options.min_margin, 1.0 - options.min_margin);
    double u2 = rng.uniform(options.min_margin, 1.0 - options.min_margin);
    if (u1 > u2) std::swap(u1, u2);
    const double pick = rng.uniform();
    const Interval T{std::max(X.lo, x - r), std::min(X.hi, x + r)};
    const int depth = T.length() > 0.0 ? monotone_depth(map, T, options.max_n) : 0;
    if (depth < 1) {
      ++out.rejected;
      continue;
    }
    const int n = 1 + std::min(depth - 1, static_cast<int>(pick * depth));
    const double L = T.length();
    DerivativeBoundReport rep;
    try {
      rep = derivative_bound_check(map, SplitInterval(T.lo, 1, u1 * L, (u2 - u1) * L, (1.0 - u2) * L), n,
                                   options.grid);
    } catch (const Error&) {
      ++out.rejected;
      continue;
    }
    if (!(rep.c_hat > 0.0)) ++out.nonpositive;
    if (out.samples < options.samples) out.c_hat_base = std::min(out.c_hat_base, rep.c_hat);
    if (rep.c_hat < out.c_hat_doubled) {
      out.c_hat_doubled = rep.c_hat;
      out.worst = rep;
      out.worst_x = x;
    }
    out.rows.push_back({x, T.lo, T.hi, T.lo + u1 * L, T.lo + u2 * L, static_cast<double>(n), rep.delta,
                        rep.min_derivative, rep.rhs, rep.c_hat});
    ++out.samples;
  }
  out.change = relative_change(out.c_hat_base, out.c_hat_doubled);
  return out;
}

Report report(const MapSpec& map, const DerivativeBoundOptions& options, const DerivativeBoundResult& result) {
  Report r;
  r.experiment = "derivative_bound";
  r.map = map_to_json(map);
  r.params = {{"samples", options.samples},
              {"max_n", options.max_n},
              {"grid", options.grid},
              {"min_radius", options.min_radius},
              {"max_radius", options.max_radius},
              {"min_margin", options.min_margin},
              {"stability", options.stability},
              {"seed", options.seed}};
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  r.fitted = {{"C6", num(result.c_hat_base)},
              {"C6_doubled", num(result.c_hat_doubled)},
              {"change", num(result.change)},
              {"samples", result.samples}};
  r.violations = result.nonpositive;
  if (result.worst) {
    r.worst_witness = {{"x", result.worst_x},
                       {"n", result.worst->n},
                       {"delta", result.worst->delta},
                       {"min_derivative", result.worst->min_derivative},
                       {"c_hat", result.worst->c_hat}};
  }
  r.pass = result.samples > 0 && result.pass(options.stability);
  r.details = {{"rejected", result.rejected}};
  r.csv_header = {"x", "T_lo", "T_hi", "J_lo", "J_hi", "n", "delta", "min_derivative", "rhs", "c_hat"};
  r.csv_rows = result.rows;
  return r;
}

}  // namespace unimodal::verify
