// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "unimodal/crossratio.hpp"
#include "unimodal/error.hpp"
#include "unimodal/jet.hpp"
#include "unimodal/mdp.hpp"
#include "unimodal/polynomial.hpp"
#include "unimodal/return_maps.hpp"
#include "unimodal/verify.hpp"

using namespace unimodal;
using namespace unimodal::verify;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

MapSpec conjugated_family() { return conjugated_test_family(MapSpec::logistic(3.9), 1.0); }

// Random split M ⊃ J around x with n-fold monotone M inside X.
std::optional<SplitInterval> random_monotone_split(const SmoothMap& m, std::mt19937_64& rng, int n, double max_radius) {
  const Interval X = m.domain();
  const double x = X.lo + X.length() * u01(rng);
  const double r = std::exp(std::log(1e-6) + (std::log(max_radius) - std::log(1e-6)) * u01(rng)) * X.length();
  const Interval M{std::max(X.lo, x - r), std::min(X.hi, x + r)};
  if (M.length() <= 0 || monotone_depth(m, M, n) < n) return std::nullopt;
  double p = u01(rng), q = u01(rng);
  if (p > q) std::swap(p, q);
  const double a = M.lo + M.length() * (0.05 + 0.9 * p);
  const double b = M.lo + M.length() * (0.05 + 0.9 * q);
  if (b - a < 1e-3 * M.length()) return std::nullopt;
  return SplitInterval::from_intervals(M, {a, b});
}

// 1. eval_jet against finite differences of value and derivative.
Outcome jets() {
  const std::vector<MapSpec> maps{MapSpec::logistic(3.9), MapSpec::quadratic(-1.7),
                                  MapSpec::polynomial({0.1, 3.0, -3.0}, {0.0, 1.0}), conjugated_family()};
  const double h = 1e-5;
  double worst = 0;
  long points = 0;
  for (const MapSpec& m : maps) {
    const Interval X = m.domain();
    for (int k = 0; k < 1000; ++k) {
      const double x = X.lo + 3 * h + (X.length() - 6 * h) * (k + 0.5) / 1000;
      const Jet3 j = eval_jet(m, x);
      const double d1 = (m.value(x - 2 * h) - 8 * m.value(x - h) + 8 * m.value(x + h) - m.value(x + 2 * h)) / (12 * h);
      const double d2 = (m.derivative(x - 2 * h) - 8 * m.derivative(x - h) + 8 * m.derivative(x + h) - m.derivative(x + 2 * h)) / (12 * h);
      auto f2 = [&](double t) { return eval_jet(m, t).f2; };
      const double d3 = (f2(x - 2 * h) - 8 * f2(x - h) + 8 * f2(x + h) - f2(x + 2 * h)) / (12 * h);
      for (auto [v, ref] : {std::pair{j.f1, d1}, {j.f2, d2}, {j.f3, d3}}) {
        worst = std::max(worst, std::abs(v - ref) / std::max(1.0, std::abs(ref)));
      }
      ++points;
    }
  }
  return {worst <= 1e-5, fmt("%ld points, max relative error %.3g (tolerance 1e-5)", points, worst)};
}

// 2. Schwarzian values and the composition identity.
Outcome schwarzians() {
  double worst_s0 = 0;
  for (double a : {0.5, 2.0, 3.2, 3.9, 4.0}) worst_s0 = std::max(worst_s0, std::abs(schwarzian_at(MapSpec::logistic(a), 0.0) + 6));
  const double power = schwarzian(Polynomial({0, 0, 1}).jet(1.0));
  const double alpha = 2, formula = (1 - alpha * alpha) / 2;
  const MapSpec m = MapSpec::logistic(3.9);
  std::mt19937_64 rng(2);
  double worst_rel = 0;
  long checked = 0;
  while (checked < 2000) {
    const double x = u01(rng);
    const int n = 2 + static_cast<int>(rng() % 19);
    const int p = 1 + static_cast<int>(rng() % (n - 1));
    const Orbit o = orbit(m, x, n);
    if (std::any_of(o.points.begin(), o.points.end() - 1, [](double y) { return std::abs(y - 0.5) < 1e-3; })) continue;
    const double direct = schwarzian_iterate(m, x, n);
    const double dp = o.derivative_products[p];
    const double two_stage = schwarzian_iterate(m, o.points[p], n - p) * dp * dp + schwarzian_iterate(m, x, p);
    Jet3 jn{x, 1, 0, 0};
    for (int i = 0; i < n; ++i) jn = compose(m.jet(jn.f0), jn);
    const double scale = std::max(1.0, std::abs(direct));
    worst_rel = std::max({worst_rel, std::abs(direct - two_stage) / scale, std::abs(direct - schwarzian(jn)) / scale});
    ++checked;
  }
  const bool pass = worst_s0 <= 1e-10 && std::abs(power - formula) <= 1e-12 && worst_rel <= 1e-8;
  return {pass, fmt("|Sf(0)+6| <= %.2g, S(x^2)(1) = %.17g, composition max rel %.3g over %ld orbits", worst_s0, power,
                    worst_rel, checked)};
}

// 3. A, B >= 1 on monotone branches of maps with negative Schwarzian.
Outcome cross_ratio_expansion() {
  std::mt19937_64 rng(3);
  long samples = 0, violations = 0;
  double min_a = INFINITY, min_b = INFINITY;
  const std::vector<MapSpec> maps{MapSpec::logistic(2.8), MapSpec::logistic(3.5), MapSpec::logistic(4.0)};
  while (samples < 10000) {
    const MapSpec& m = maps[samples % 3];
    const int n = 1 + static_cast<int>(rng() % 10);
    const auto s = random_monotone_split(m, rng, n, 0.1);
    if (!s) continue;
    const auto d = distortion(m, n, *s);
    min_a = std::min(min_a, d.A);
    min_b = std::min(min_b, d.B);
    if (d.A < 1 - 1e-9 || d.B < 1 - 1e-9) ++violations;
    ++samples;
  }
  return {violations == 0, fmt("%ld samples, %ld violations, min A %.12g, min B %.12g", samples, violations, min_a, min_b)};
}

// 4. Koebe bound.
Outcome koebe() {
  const double k11 = koebe_bound(1, 1);
  const MapSpec m = MapSpec::logistic(3.9);
  std::mt19937_64 rng(4);
  long samples = 0, failures = 0;
  double worst = 0;
  while (samples < 1000) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const auto s = random_monotone_split(m, rng, n, 0.05);
    if (!s) continue;
    const auto r = koebe_check(m, n, *s);
    if (!r.pass) ++failures;
    worst = std::max(worst, r.derivative_ratio / r.bound);
    ++samples;
  }
  return {k11 == 4.0 && failures == 0,
          fmt("koebe_bound(1,1) = %.17g, %ld configurations, %ld failures, max ratio/bound %.4g", k11, samples, failures, worst)};
}

bool rectangles_disjoint(const SplitCollection& coll) {
  for (std::size_t i = 0; i < coll.size(); ++i) {
    for (std::size_t j = i + 1; j < coll.size(); ++j) {
      const Interval a1 = coll[i].M_minus(), b1 = coll[i].M_plus(), a2 = coll[j].M_minus(), b2 = coll[j].M_plus();
      if (std::min(a1.hi, a2.hi) > std::max(a1.lo, a2.lo) && std::min(b1.hi, b2.hi) > std::max(b1.lo, b2.lo)) return false;
    }
  }
  return true;
}

SplitCollection random_collection(std::mt19937_64& rng, int k) {
  SplitCollection out;
  while (static_cast<int>(out.size()) < k) {
    double p[4] = {u01(rng), u01(rng), u01(rng), u01(rng)};
    std::sort(p, p + 4);
    if (p[1] - p[0] < 1e-9 || p[2] - p[1] < 1e-9 || p[3] - p[2] < 1e-9) continue;
    out.push_back(SplitInterval::from_intervals({p[0], p[3]}, {p[1], p[2]}));
  }
  return out;
}

// 5. Margin sum bound on MDP collections.
Outcome margin_sums() {
  std::mt19937_64 rng(5);
  long collections = 0, violations = 0, tried = 0;
  while (collections < 1000) {
    const SplitCollection coll = random_collection(rng, 2 + static_cast<int>(rng() % 6));
    ++tried;
    if (!check_mdp(coll).pass()) continue;
    if (!margin_sum_bound(coll, {0, 1}).pass) ++violations;
    ++collections;
  }
  long disagreements = 0, failing = 0;
  for (int k = 0; k < 100; ++k) {
    const SplitCollection coll = random_collection(rng, 2 + static_cast<int>(rng() % 6));
    const bool pass = check_mdp(coll).pass();
    if (!pass) ++failing;
    if (pass != rectangles_disjoint(coll)) ++disagreements;
  }
  return {violations == 0 && disagreements == 0,
          fmt("%ld passing collections (%ld drawn), %ld bound violations; oracle disagreements %ld/100 (%ld non-MDP)",
              collections, tried, violations, disagreements, failing)};
}

// 6. Orbits of critical pullbacks have MDP.
Outcome critical_pullbacks() {
  const std::vector<MapSpec> maps{MapSpec::logistic(3.9), MapSpec::logistic(4.0), conjugated_family()};
  std::mt19937_64 rng(6);
  long samples = 0, violations = 0;
  while (samples < 1000) {
    const MapSpec& m = maps[samples % 3];
    const int n = static_cast<int>(rng() % 9);
    double z = m.critical_point();
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      const auto pre = lap_preimages(m, z);
      ok = !pre.empty();
      if (ok) z = pre[rng() % pre.size()];
    }
    if (!ok) continue;
    const Interval X = m.domain();
    double rho = std::exp(std::log(1e-6) + (std::log(1e-2) - std::log(1e-6)) * u01(rng));
    const double left = 0.1 + 2 * u01(rng), right = 0.1 + 2 * u01(rng);
    auto M = [&] { return Interval{z - rho * (1 + left), z + rho * (1 + right)}; };
    while (rho > 1e-13 && (M().lo < X.lo || M().hi > X.hi || monotone_depth(m, M(), n) < n)) rho /= 2;
    if (rho <= 1e-13) continue;
    // J = [z − ρ, z + ρ] contains the depth-n critical preimage, so c ∈ fⁿ(J).
    if (!mdp_from_critical_pullback(m, SplitInterval::from_intervals(M(), {z - rho, z + rho}), n).pass()) ++violations;
    ++samples;
  }
  return {violations == 0, fmt("%ld configurations, %ld violations", samples, violations)};
}

// 7. First-entry decomposition against plain iteration.
Outcome entry_maps() {
  struct Case {
    MapSpec map;
    Interval T;
  };
  const int depth = 12, N = 100000;
  std::string detail;
  bool pass = true;
  for (const Case& c : {Case{MapSpec::logistic(4.0), {0.25, 0.75}}, Case{MapSpec::logistic(3.2), {0.3125, 0.6875}}}) {
    const auto d = first_entry_decomposition(c.map, {c.T, 10000, 0.0}, depth);
    long mismatches = 0, far = 0;
    for (int k = 0; k < N; ++k) {
      const double x = (k + 0.5) / N;
      double y = x;
      int naive = 0;
      for (int n = 1; n <= depth && !naive; ++n) {
        y = c.map.value(y);
        if (c.T.contains(y)) naive = n;
      }
      const Branch* b = branch_containing(d, x);
      if ((b ? b->entry_time : 0) == naive) continue;
      ++mismatches;
      double near = INFINITY;
      for (const Branch& br : d.branches) near = std::min({near, std::abs(x - br.domain.lo), std::abs(x - br.domain.hi)});
      if (near > 1e-8) ++far;
    }
    pass = pass && mismatches < N / 1000 && far == 0 && !d.partial;
    detail += fmt("a=%g: %ld mismatches (%ld away from endpoints); ", c.map.parameter(), mismatches, far);
  }
  const auto d1 = first_entry_decomposition(MapSpec::logistic(4.0), {{0.25, 0.75}, 10000, 0.0}, 1);
  const double r = std::sqrt(3.0) / 4;
  double endpoint_error = INFINITY;
  if (d1.branches.size() == 2) {
    endpoint_error = std::max(std::abs(d1.branches[0].domain.lo - (0.5 - r)), std::abs(d1.branches[1].domain.hi - (0.5 + r)));
  }
  const MapSpec l32 = MapSpec::logistic(3.2);
  const auto rc = classify_return(l32, first_entry_decomposition(l32, {{0.3125, 0.6875}, 10000, 0.0}, 2));
  const double image_error = std::max(std::abs(rc.image.lo - 0.512), std::abs(rc.image.hi - 0.6875));
  pass = pass && endpoint_error <= 1e-10 && image_error <= 1e-10;
  detail += fmt("endpoint error %.2g, f^2(T) = [%.15g, %.15g]", endpoint_error, rc.image.lo, rc.image.hi);
  return {pass, detail};
}

// 8. Renormalization verdicts.
Outcome renormalization() {
  const auto r = is_renormalizable(MapSpec::logistic(3.2), {{0.3125, 0.6875}, 10000, 0.0}, 8);
  const auto n = is_renormalizable(MapSpec::logistic(4.0), {{0.25, 0.75}, 10000, 0.0}, 8);
  const bool interval_ok = r.restrictive_interval && std::abs(r.restrictive_interval->lo - 0.3125) <= 1e-10 &&
                           std::abs(r.restrictive_interval->hi - 0.6875) <= 1e-10;
  return {r.verdict == Verdict::pass && r.period == 2 && interval_ok && n.verdict == Verdict::fail,
          fmt("logistic(3.2): %s period %d; logistic(4): %s", to_string(r.verdict), r.period, to_string(n.verdict))};
}

// 9. Lower derivative bound constant.
Outcome derivative_bound() {
  bool pass = true;
  std::string detail;
  for (const MapSpec& m : {MapSpec::logistic(3.9), conjugated_family()}) {
    const auto r = fit_derivative_bound(m, DerivativeBoundOptions{});
    pass = pass && r.samples >= 1000 && r.pass(0.1);
    detail += fmt("%s: inf c_hat %.6g -> %.6g (change %.3g, %ld nonpositive); ", m.describe().c_str(), r.c_hat_base,
                  r.c_hat_doubled, r.change, r.nonpositive);
  }
  return {pass, detail};
}

// 10. Negative Schwarzian of first entries near f(c) for the conjugated family.
Outcome theorem_a() {
  const MapSpec g = conjugated_family();
  const auto r = verify_theorem_a(g, TheoremAOptions{});
  const auto Z = r.certified_Z(g.critical_value());
  const bool certified = Z && r.levels[*r.certified].entries >= 10000 && Z->length() >= 1e-6 && r.recheck_failures == 0;
  std::string detail = fmt("(i) max Sg = %.6g at x = %.6g: %s; (ii) ", r.max_map_schwarzian, r.argmax,
                           r.non_vacuous() ? "non-vacuous" : "Sg < 0 everywhere, vacuous");
  if (Z) {
    const ZLevel& l = r.levels[*r.certified];
    detail += fmt("Z = [%.6g, %.6g], %ld entries, max S %.6g", Z->lo, Z->hi, l.entries, l.max_schwarzian);
  } else {
    detail += "no certified Z";
  }
  // A stronger conjugacy with Sg > 0 somewhere, reported for context only.
  const MapSpec strong = conjugated_test_family(MapSpec::logistic(3.9), 1.9);
  const auto s = verify_theorem_a(strong, TheoremAOptions{});
  detail += fmt(" [s=1.9 conjugacy: max Sg %.4g, certified %s]", s.max_map_schwarzian, s.certified ? "yes" : "no");
  return {r.non_vacuous() && certified, detail};
}

// 11. Cross-ratio lower bound fits.
Outcome theorem_b() {
  const auto raw = verify_theorem_b(MapSpec::logistic(4.0), TheoremBOptions{});
  const auto g = verify_theorem_b(conjugated_family(), TheoremBOptions{});
  const bool raw_ok = raw.doubled.C2_A == 0.0 && raw.doubled.C2_B == 0.0 && raw.recheck_failures == 0;
  const bool g_ok = std::isfinite(g.doubled.C2_A) && std::isfinite(g.doubled.C2_B) && g.stable(0.2) &&
                    g.holdout_violations == 0 && g.recheck_failures == 0;
  return {raw_ok && g_ok, fmt("logistic(4): C2 = (%g, %g); conjugated: C2 = (%.6g, %.6g), change (%.3g, %.3g), "
                              "%ld held-out violations",
                              raw.doubled.C2_A, raw.doubled.C2_B, g.doubled.C2_A, g.doubled.C2_B, g.change_A,
                              g.change_B, g.holdout_violations)};
}

// 12. Cross-ratio bound inside first-entry domains of a cascade level.
Outcome theorem_c() {
  bool pass = true;
  std::string detail;
  for (const MapSpec& m : {MapSpec::logistic(3.9), conjugated_family()}) {
    TheoremCOptions o;
    o.K = 0.99;
    const auto r = verify_theorem_c(m, o);
    if (!r.passing_level) {
      pass = false;
      detail += fmt("%s: no passing level (%s); ", m.describe().c_str(), r.cascade_stop.c_str());
      continue;
    }
    const TheoremCLevel& l = r.levels[*r.passing_level];
    pass = pass && l.min_A > o.K && l.min_B > o.K && r.recheck_failures == 0;
    detail += fmt("%s: level %d, %ld samples, min A %.6g, min B %.6g; ", m.describe().c_str(), *r.passing_level,
                  l.samples, l.min_A, l.min_B);
  }
  return {pass, detail};
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 13. Byte-identical reports across two runs.
Outcome determinism() {
  const std::filesystem::path config = std::filesystem::path(UNIMODAL_SOURCE_DIR) / "configs" / "smoke.json";
  const auto tmp = std::filesystem::temp_directory_path();
  const auto d1 = tmp / "unimodal_acceptance_1", d2 = tmp / "unimodal_acceptance_2";
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
  const auto a = run_file(config.string(), d1.string());
  const auto b = run_file(config.string(), d2.string());
  long files = 0, different = 0;
  for (const auto& entry : std::filesystem::directory_iterator(d1)) {
    ++files;
    if (read_all(entry.path()) != read_all(d2 / entry.path().filename())) ++different;
  }
  const bool pass = a.exit_code == b.exit_code && a.exit_code != 2 && files > 0 && different == 0;
  return {pass, fmt("%ld files compared, %ld differ (exit codes %d, %d)", files, different, a.exit_code, b.exit_code)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "jet correctness", 1, jets},
      {2, "Schwarzian values", 1, schwarzians},
      {3, "cross-ratio expansion", 30, cross_ratio_expansion},
      {4, "Koebe bound", 30, koebe},
      {5, "margin sum bound", 10, margin_sums},
      {6, "critical pullback MDP", 30, critical_pullbacks},
      {7, "entry-map oracle", 30, entry_maps},
      {8, "renormalization", 5, renormalization},
      {9, "derivative bound constant", 60, derivative_bound},
      {10, "negative Schwarzian near f(c)", 180, theorem_a},
      {11, "cross-ratio lower bound", 180, theorem_b},
      {12, "cascade cross-ratio bound", 180, theorem_c},
      {13, "determinism", 600, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s %2d %s (%.2f s of %.0f s%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name, seconds, c.budget_s,
                in_time ? "" : ", over budget", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
