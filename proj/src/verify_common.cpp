#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "unimodal/error.hpp"
#include "unimodal/map_io.hpp"
#include "unimodal/verify.hpp"

namespace unimodal::verify {

using nlohmann::json;

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

int Rng::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(engine_() % span);
}

std::vector<double> cubic_bump_diffeo(double strength) {
  // x + s(−x³ + 1.5x² − 0.5x)
  return {0.0, 1.0 - 0.5 * strength, 1.5 * strength, -strength};
}

MapSpec conjugated_test_family(const MapSpec& base, double strength) {
  return MapSpec::conjugated(base, cubic_bump_diffeo(strength));
}

double relative_change(double a, double b) {
  if (a == b) return 0.0;
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(b - a) / std::abs(a);
}

NiceInterval fixed_point_nice_interval(const MapSpec& map, int horizon) {
  return nice_from_periodic(map, reversing_fixed_point(map), 1, horizon);
}

// ---------------------------------------------------------------------------

namespace {

bool converges_to(const SmoothMap& map, double y, double p, int period, int budget) {
  const double tol = 1e-9 * std::max(1.0, map.domain().length());
  for (int used = 0; used < budget; used += period) {
    if (std::abs(y - p) <= tol) return true;
    y = iterate(map, y, period);
    if (!std::isfinite(y)) return false;
  }
  return std::abs(y - p) <= tol;
}

// Component of the f^period-basin of p containing p, by doubling steps and bisection.
Interval immediate_basin(const SmoothMap& map, double p, int period, double& resolution, bool& conclusive) {
  const Interval X = map.domain();
  constexpr int kBudget = 20000;
  double ends[2];
  for (int side = 0; side < 2; ++side) {
    const double dir = side == 0 ? -1.0 : 1.0;
    const double edge = side == 0 ? X.lo : X.hi;
    double good = p;
    double bad = p;
    double step = 1e-7 * X.length();
    bool reached_edge = false;
    while (true) {
      double y = p + dir * step;
      if ((y - edge) * dir >= 0.0) {
        y = edge;
        if (converges_to(map, y, p, period, kBudget)) {
          good = edge;
          reached_edge = true;
        } else {
          bad = edge;
        }
        break;
      }
      if (!converges_to(map, y, p, period, kBudget)) {
        bad = y;
        break;
      }
      good = y;
      step *= 2.0;
    }
    if (good == p) conclusive = false;
    if (!reached_edge) {
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (good + bad);
        if (converges_to(map, mid, p, period, kBudget)) good = mid; else bad = mid;
      }
      resolution = std::max(resolution, std::abs(bad - good));
    }
    ends[side] = good;
  }
  return {ends[0], ends[1]};
}

}  // namespace

AttractorSurvey survey_attractors(const SmoothMap& map, AttractorOptions options) {
  AttractorSurvey out;
  const Interval X = map.domain();
  const double detect_tol = 1e-7 * std::max(1.0, X.length());
  const double polish_tol = 1e-10 * std::max(1.0, X.length());
  std::vector<PeriodicOrbit> found;
  auto known = [&](double z) {
    for (const PeriodicOrbit& o : found) {
      for (double q : o.points) {
        if (std::abs(q - z) <= 1e-8) return true;
      }
    }
    return false;
  };
  for (int k = 0; k < options.grid; ++k) {
    double x = X.lo + X.length() * (k + 0.5) / options.grid;
    for (int t = 0; t < options.transient; ++t) x = map.value(x);
    int period = 0;
    for (int p = 1; p <= options.max_period && period == 0; ++p) {
      if (std::abs(iterate(map, x, p) - x) <= detect_tol) period = p;
    }
    if (period == 0 || known(x)) continue;
    double z = x;
    for (int it = 0; it < 50; ++it) {
      const Orbit o = orbit(map, z, period);
      const double g = o.points.back() - z;
      const double dg = o.derivative_products.back() - 1.0;
      if (dg == 0.0) break;
      const double step = g / dg;
      z = std::clamp(z - step, X.lo, X.hi);
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
    }
    const Orbit o = orbit(map, z, period);
    if (std::abs(o.points.back() - z) > polish_tol || known(z)) continue;
    PeriodicOrbit cycle{{o.points.begin(), o.points.end() - 1}, o.derivative_products.back()};
    const double m = std::abs(cycle.multiplier);
    if (std::abs(m - 1.0) <= options.neutral_tolerance) {
      out.neutral.push_back(cycle);
      found.push_back(cycle);
    } else if (m < 1.0) {
      out.attracting.push_back(cycle);
      found.push_back(cycle);
    }
  }
  for (const PeriodicOrbit& o : out.attracting) {
    for (double p : o.points) {
      out.basins.push_back(immediate_basin(map, p, o.period(), out.basin_resolution, out.conclusive));
    }
  }
  return out;
}

bool meets_basins(const AttractorSurvey& survey, Interval i) {
  for (const Interval& b : survey.basins) {
    if (interiors_intersect(b, i) || b.contains(i.lo) || b.contains(i.hi)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

json to_json(const Report& r) {
  json j;
  j["experiment"] = r.experiment;
  j["map"] = r.map;
  j["params"] = r.params;
  j["fitted"] = r.fitted;
  j["certified_Z"] = r.certified_Z ? interval_to_json(*r.certified_Z) : json(nullptr);
  j["violations"] = r.violations;
  j["worst_witness"] = r.worst_witness;
  j["runtime_ms"] = r.runtime_ms ? json(*r.runtime_ms) : json(nullptr);
  j["status"] = r.pass ? "pass" : "fail";
  j["details"] = r.details;
  return j;
}

std::string to_csv(const Report& r) {
  std::string out;
  for (std::size_t i = 0; i < r.csv_header.size(); ++i) {
    if (i) out += ',';
    out += r.csv_header[i];
  }
  out += '\n';
  char buf[32];
  for (const auto& row : r.csv_rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace unimodal::verify
