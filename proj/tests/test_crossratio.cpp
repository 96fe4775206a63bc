#include <cmath>
#include <random>

#include "doctest.h"
#include "unimodal/crossratio.hpp"
#include "unimodal/error.hpp"
#include "unimodal/verify.hpp"

using namespace unimodal;
using doctest::Approx;

namespace {

// Cross-ratios straight from the four boundary points.
std::pair<double, double> direct_ab(double p0, double p1, double p2, double p3) {
  const double m = std::abs(p1 - p0), j = std::abs(p2 - p1), q = std::abs(p3 - p2), t = std::abs(p3 - p0);
  return {j * t / ((m + j) * (j + q)), j * t / (m * q)};
}

struct Config {
  Interval M, J;
  int n;
};

// Random monotone configuration: M around a random point, n ≤ max_n below the fold depth.
std::optional<Config> random_config(const SmoothMap& map, std::mt19937_64& rng, int max_n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Interval X = map.domain();
  const double x = X.lo + X.length() * u(rng);
  const double r = X.length() * std::exp(std::log(1e-5) + u(rng) * (std::log(0.2) - std::log(1e-5)));
  const Interval M{std::max(X.lo, x - r), std::min(X.hi, x + r)};
  const int depth = monotone_depth(map, M, max_n);
  if (depth < 1) return std::nullopt;
  const int n = 1 + static_cast<int>(u(rng) * depth) % depth;
  double a = 0.05 + 0.9 * u(rng), b = 0.05 + 0.9 * u(rng);
  if (a > b) std::swap(a, b);
  if (b - a < 1e-6) return std::nullopt;
  return Config{M, {M.lo + a * M.length(), M.lo + b * M.length()}, n};
}

}  // namespace

TEST_CASE("cross_ratios") {
  auto cr = cross_ratios(SplitInterval::from_intervals({0, 1}, {0.25, 0.75}));
  CHECK(cr.b == Approx(8.0));
  CHECK(cr.a == Approx(8.0 / 9.0));
  cr = cross_ratios(SplitInterval::from_intervals({0, 1}, {0.2, 0.4}));
  CHECK(cr.b == Approx(5.0 / 3.0));
  CHECK(cr.a == Approx(0.625));
  const auto scaled = cross_ratios(SplitInterval::from_intervals({0, 2}, {0.4, 0.8}));
  CHECK(scaled.a == Approx(cr.a).epsilon(1e-14));
  CHECK(scaled.b == Approx(cr.b).epsilon(1e-14));
  CHECK_THROWS_AS(SplitInterval::from_intervals({0, 1}, {0.0, 0.5}), Error);
  CHECK_THROWS_AS(SplitInterval(0.0, 1, 0.2, 0.0, 0.3), Error);
}

TEST_CASE("cross-ratio invariants on random splits") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int k = 0; k < 500; ++k) {
    const double m = u(rng), j = u(rng), q = u(rng), x0 = u(rng) - 0.5;
    const SplitInterval s(x0, 1, m, j, q);
    const auto cr = cross_ratios(s);
    CHECK(cr.a < 1.0);
    CHECK(cr.b > cr.a);
    const double slope = 0.1 + 3 * u(rng), offset = u(rng);
    const auto img = cross_ratios(SplitInterval(slope * x0 + offset, 1, slope * m, slope * j, slope * q));
    CHECK(img.a == Approx(cr.a).epsilon(1e-12));
    CHECK(img.b == Approx(cr.b).epsilon(1e-12));
  }
}

TEST_CASE("schwarzian values") {
  for (double a : {2.8, 3.5, 3.9, 4.0}) CHECK(schwarzian_at(MapSpec::logistic(a), 0.0) == Approx(-6.0).epsilon(1e-10));
  // −6/(1 − 2x)² for the logistic family.
  const MapSpec l = MapSpec::logistic(3.7);
  for (double x : {0.1, 0.3, 0.45, 0.8}) CHECK(schwarzian_at(l, x) == Approx(-6.0 / ((1 - 2 * x) * (1 - 2 * x))));
  // S(x^α) = (1 − α²)/(2x²) with α = 2.
  CHECK(schwarzian(Polynomial({0, 0, 1}).jet(1.0)) == Approx(-1.5));
  const AffineMap affine(2.0, 1.0);
  CHECK(schwarzian_at(affine, 0.7) == 0.0);
  CHECK_THROWS_AS(schwarzian_at(l, 0.5 + 1e-10), Error);
}

TEST_CASE("schwarzian_iterate") {
  const MapSpec l4 = MapSpec::logistic(4.0);
  CHECK(schwarzian_iterate(l4, 0.0, 2) == Approx(-102.0));
  CHECK(schwarzian_iterate(l4, 0.3, 1) == schwarzian_at(l4, 0.3));
  CHECK(schwarzian_iterate(l4, 0.3, 0) == 0.0);

  const std::vector<MapSpec> maps{MapSpec::logistic(3.9),
                                  verify::conjugated_test_family(MapSpec::logistic(3.9), 1.9)};
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (const MapSpec& m : maps) {
    for (int k = 0; k < 50; ++k) {
      const double x = m.domain().lo + m.domain().length() * u(rng);
      // Oracle: Schwarzian of the composed jet of f⁴.
      Jet3 j{x, 1.0, 0.0, 0.0};
      for (int i = 0; i < 4; ++i) j = compose(m.jet(j.f0), j);
      CHECK(schwarzian_iterate(m, x, 4) == Approx(schwarzian(j)).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(schwarzian_iterate(l4, 0.5, 2), Error);
  // 1 − 1/√2 maps to 1/2 under f.
  CHECK_THROWS_AS(schwarzian_iterate(l4, 0.5 - std::sqrt(0.125), 3), Error);
}

TEST_CASE("schwarzian composition rule") {
  const MapSpec m = verify::conjugated_test_family(MapSpec::logistic(3.9), 1.9);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int k = 0; k < 100; ++k) {
    const double x = u(rng);
    const int p = 1 + static_cast<int>(u(rng) * 9), q = 1 + static_cast<int>(u(rng) * 9);
    const Orbit o = orbit(m, x, p);
    const double dp = o.derivative_products.back();
    const double lhs = schwarzian_iterate(m, x, p + q);
    const double rhs = schwarzian_iterate(m, o.points.back(), q) * dp * dp + schwarzian_iterate(m, x, p);
    CHECK(lhs == Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("distortion") {
  const IdentityMap id;
  const auto d0 = distortion(id, 0, SplitInterval::from_intervals({0, 1}, {0.3, 0.4}));
  CHECK(d0.A == 1.0);
  CHECK(d0.B == 1.0);

  const MapSpec l4 = MapSpec::logistic(4.0);
  const auto d = distortion(l4, 1, SplitInterval::from_intervals({0.1, 0.4}, {0.2, 0.3}));
  const auto [a0, b0] = direct_ab(0.1, 0.2, 0.3, 0.4);
  const auto [a1, b1] = direct_ab(0.36, 0.64, 0.84, 0.96);
  CHECK(d.B == Approx(b1 / b0).epsilon(1e-12));
  CHECK(d.A == Approx(a1 / a0).epsilon(1e-12));
  CHECK(d.B == Approx(1.190476190476).epsilon(1e-10));
  CHECK(d.A == Approx(1.041666666667).epsilon(1e-10));
  CHECK(d.image_split.M().lo == Approx(0.36));
  CHECK(d.image_split.J().hi == Approx(0.84));

  try {
    distortion(l4, 2, SplitInterval::from_intervals({0.1, 0.4}, {0.2, 0.3}));
    FAIL("expected a fold");
  } catch (const FoldError& e) {
    CHECK(e.step() == 1);
    CHECK(l4.value(e.critical_preimage()) == Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("distortion matches direct evaluation on decreasing branches") {
  const MapSpec m = MapSpec::logistic(3.9);
  std::mt19937_64 rng(21);
  int checked = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto cfg = random_config(m, rng, 6);
    if (!cfg || cfg->M.length() < 1e-3) continue;
    double p[4] = {cfg->M.lo, cfg->J.lo, cfg->J.hi, cfg->M.hi};
    const auto [a0, b0] = direct_ab(p[0], p[1], p[2], p[3]);
    for (double& v : p) v = iterate(m, v, cfg->n);
    const auto [a1, b1] = direct_ab(p[0], p[1], p[2], p[3]);
    const auto d = distortion(m, cfg->n, SplitInterval::from_intervals(cfg->M, cfg->J));
    CHECK(d.A == Approx(a1 / a0).epsilon(1e-6));
    CHECK(d.B == Approx(b1 / b0).epsilon(1e-6));
    ++checked;
  }
  CHECK(checked > 200);
}

TEST_CASE("negative Schwarzian expands cross-ratios") {
  std::mt19937_64 rng(4);
  for (double a : {2.8, 3.5, 4.0}) {
    const MapSpec m = MapSpec::logistic(a);
    int checked = 0;
    for (int k = 0; k < 1000; ++k) {
      const auto cfg = random_config(m, rng, 10);
      if (!cfg) continue;
      const auto d = distortion(m, cfg->n, SplitInterval::from_intervals(cfg->M, cfg->J));
      CHECK(d.A >= 1 - 1e-9);
      CHECK(d.B >= 1 - 1e-9);
      ++checked;
    }
    CHECK(checked > 500);
  }
  const MapSpec q = MapSpec::quadratic(-1.8);
  for (int k = 0; k < 500; ++k) {
    const auto cfg = random_config(q, rng, 10);
    if (!cfg) continue;
    const auto d = distortion(q, cfg->n, SplitInterval::from_intervals(cfg->M, cfg->J));
    CHECK(d.A >= 1 - 1e-9);
    CHECK(d.B >= 1 - 1e-9);
  }
}

TEST_CASE("cocycle property") {
  const MapSpec m = verify::conjugated_test_family(MapSpec::logistic(3.9), 1.9);
  std::mt19937_64 rng(8);
  int checked = 0;
  for (int k = 0; k < 1000 && checked < 200; ++k) {
    const auto cfg = random_config(m, rng, 12);
    if (!cfg || cfg->n < 2) continue;
    const int first = cfg->n / 2;
    const auto s = SplitInterval::from_intervals(cfg->M, cfg->J);
    const auto whole = distortion(m, cfg->n, s);
    const auto head = distortion(m, first, s);
    const auto tail = distortion(m, cfg->n - first, head.image_split);
    CHECK(whole.A == Approx(head.A * tail.A).epsilon(1e-9));
    CHECK(whole.B == Approx(head.B * tail.B).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("koebe_bound") {
  CHECK(koebe_bound(1, 1) == 4.0);
  CHECK(koebe_bound(0.5, 2) == Approx(144.0));
  CHECK(koebe_bound(0.9, 1) < koebe_bound(0.5, 1));
  CHECK(koebe_bound(1, 0.5) > koebe_bound(1, 1));
  CHECK_THROWS_AS(koebe_bound(0.0, 1), Error);
  CHECK_THROWS_AS(koebe_bound(1.2, 1), Error);
  CHECK_THROWS_AS(koebe_bound(1, 0), Error);
}

TEST_CASE("koebe_check") {
  const auto s = SplitInterval::from_intervals({0, 1}, {0.3, 0.6});
  const auto id = koebe_check(IdentityMap{}, 0, s);
  CHECK(id.derivative_ratio == 1.0);
  CHECK(id.pass);
  const auto aff = koebe_check(AffineMap(2.0, 0.0), 3, s);
  CHECK(aff.derivative_ratio == Approx(1.0));
  CHECK(aff.C == Approx(1.0));
  CHECK(aff.pass);

  const MapSpec m = MapSpec::logistic(3.9);
  std::mt19937_64 rng(12);
  int checked = 0;
  for (int k = 0; k < 400 && checked < 100; ++k) {
    const auto cfg = random_config(m, rng, 15);
    if (!cfg) continue;
    const auto r = koebe_check(m, cfg->n, SplitInterval::from_intervals(cfg->M, cfg->J), {20, 200});
    CHECK(r.C >= 1 - 1e-9);
    CHECK(r.pass);
    ++checked;
  }
}

TEST_CASE("distortion_sums") {
  const MapSpec l4 = MapSpec::logistic(4.0);
  const auto s = SplitInterval::from_intervals({0.1, 0.4}, {0.2, 0.3});
  const auto t = distortion_sums(l4, 1, s);
  CHECK(t.sum_margin_products == Approx(0.01));
  CHECK(t.sum_squares == Approx(0.09));
  const auto t0 = distortion_sums(IdentityMap{}, 0, SplitInterval::from_intervals({0, 1}, {0.4, 0.6}));
  CHECK(t0.sum_margin_products == 0.0);
  CHECK(t0.sum_squares == 0.0);
  // Two steps: add the image terms (0.28·0.12, 0.6²).
  const auto t2 = distortion_sums(l4, 2, SplitInterval::from_intervals({0.05, 0.1}, {0.06, 0.08}));
  const double p[4] = {0.05, 0.06, 0.08, 0.1};
  double q[4];
  for (int i = 0; i < 4; ++i) q[i] = l4.value(p[i]);
  CHECK(t2.sum_margin_products == Approx(0.01 * 0.02 + (q[1] - q[0]) * (q[3] - q[2])));
  CHECK(t2.sum_squares == Approx(0.05 * 0.05 + (q[3] - q[0]) * (q[3] - q[0])));
}

TEST_CASE("monotone extension") {
  const MapSpec l4 = MapSpec::logistic(4.0);
  const Interval v = monotone_extension(l4, {0.75, 0.9}, 1);
  CHECK(v.lo == Approx(0.5).epsilon(1e-12));
  CHECK(v.hi == 1.0);
  const Interval w = monotone_extension(l4, {0.05, 0.1}, 2);
  // f² folds where f(x) = 1/2, at x = 1/2 − √2/4.
  CHECK(w.lo == 0.0);
  CHECK(w.hi == Approx(0.5 - std::sqrt(2.0) / 4).epsilon(1e-12));
  CHECK(first_fold(l4, {0.4, 0.6}, 3) == 0);
  CHECK(monotone_depth(l4, {0.1, 0.2}, 10) == 1);
  CHECK(monotone_depth(l4, {0.05, 0.1}, 10) == 3);
  CHECK_THROWS_AS(monotone_extension(l4, {0.1, 0.2}, 2), FoldError);
}
