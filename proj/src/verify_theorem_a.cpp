#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "unimodal/crossratio.hpp"
#include "unimodal/error.hpp"
#include "unimodal/map_io.hpp"
#include "unimodal/verify.hpp"

namespace unimodal::verify {

using nlohmann::json;

namespace {

constexpr double kNearCritical = 1e-9;

// Strict distance records of fⁿ(x) to f(c): the first entry into any
// symmetric Z around f(c) is the first record inside Z.
struct Record {
  int n;
  double distance;
  double schwarzian;
  double image;
};

struct SampleTrace {
  double x;
  std::vector<Record> records;
  bool truncated;
};

SampleTrace trace(const SmoothMap& map, double x, double c, double fc, int max_entry) {
  SampleTrace t{x, {}, false};
  double y = x;
  double d = 1.0;
  double s = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= max_entry; ++n) {
    if (std::abs(y - c) <= kNearCritical) {
      t.truncated = true;
      break;
    }
    const Jet3 j = map.jet(y);
    s += schwarzian(j) * d * d;
    d *= j.f1;
    y = j.f0;
    if (!std::isfinite(s) || !std::isfinite(d)) {
      t.truncated = true;
      break;
    }
    const double dist = std::abs(y - fc);
    if (dist < best) {
      best = dist;
      t.records.push_back({n, dist, s, y});
    }
  }
  return t;
}

const Record* first_entry(const SampleTrace& t, double half_width) {
  for (const Record& r : t.records) {
    if (r.distance <= half_width) return &r;
  }
  return nullptr;
}

json witness_json(const EntryWitness& w) {
  return {{"x", w.x}, {"n", w.n}, {"image", w.image}, {"schwarzian", w.schwarzian}};
}

}  // namespace

std::optional<Interval> TheoremAResult::certified_Z(double critical_value) const {
  if (!certified) return std::nullopt;
  const double h = levels[*certified].width / 2;
  return Interval{critical_value - h, critical_value + h};
}

TheoremAResult verify_theorem_a(const MapSpec& map, const TheoremAOptions& options) {
  TheoremAResult out;
  const Interval X = map.domain();
  const double c = map.critical_point();
  const double fc = map.critical_value();

  out.max_map_schwarzian = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < options.schwarzian_grid; ++k) {
    const double x = X.lo + X.length() * (k + 0.5) / options.schwarzian_grid;
    if (std::abs(x - c) <= kNearCritical) continue;
    const double s = schwarzian(map.jet(x));
    if (std::isfinite(s) && s > out.max_map_schwarzian) {
      out.max_map_schwarzian = s;
      out.argmax = x;
    }
  }

  out.critical_min_return = std::numeric_limits<double>::infinity();
  double y = c;
  for (int i = 1; i <= options.horizon; ++i) {
    y = map.value(y);
    out.critical_min_return = std::min(out.critical_min_return, std::abs(y - c));
    if (out.critical_min_return <= 1e-12) {
      std::ostringstream os;
      os << "critical point returns to itself at iterate " << i;
      throw Error(ErrorKind::inapplicable, os.str());
    }
  }

  Rng rng(options.seed);
  std::vector<SampleTrace> traces;
  traces.reserve(options.samples);
  for (int k = 0; k < options.samples; ++k) {
    traces.push_back(trace(map, X.lo + X.length() * rng.uniform(), c, fc, options.max_entry));
    if (traces.back().truncated) ++out.excluded;
  }

  for (double w = options.initial_fraction * X.length(); w >= options.min_width; w /= 2) {
    ZLevel level;
    level.width = w;
    level.max_schwarzian = -std::numeric_limits<double>::infinity();
    for (const SampleTrace& t : traces) {
      const Record* r = first_entry(t, w / 2);
      if (!r) continue;
      ++level.entries;
      if (r->schwarzian > level.max_schwarzian) {
        level.max_schwarzian = r->schwarzian;
        level.worst = {t.x, r->n, r->image, r->schwarzian};
      }
    }
    level.pass = level.entries >= options.min_entries && level.max_schwarzian < 0.0;
    if (level.pass && !out.certified) out.certified = out.levels.size();
    out.levels.push_back(level);
  }

  const double h = out.levels.empty()
                       ? 0.0
                       : out.levels[out.certified.value_or(out.levels.size() - 1)].width / 2;
  long entered = 0;
  for (const SampleTrace& t : traces) {
    const Record* r = first_entry(t, h);
    if (r) {
      out.rows.push_back({t.x, static_cast<double>(r->n), r->image, r->schwarzian});
      if (entered++ % 100 != 0) continue;
      // Independent re-evaluation by plain iteration.
      ++out.rechecked;
      const Orbit o = orbit(map, t.x, r->n);
      int n_direct = 0;
      for (int i = 1; i <= r->n; ++i) {
        if (std::abs(o.points[i] - fc) <= h) {
          n_direct = i;
          break;
        }
      }
      const double s_direct = schwarzian_iterate(map, t.x, r->n);
      if (n_direct != r->n || std::abs(s_direct - r->schwarzian) > 1e-9 * std::max(1.0, std::abs(s_direct))) {
        ++out.recheck_failures;
      }
    } else {
      out.rows.push_back({t.x, 0.0, std::nan(""), std::nan("")});
    }
  }
  return out;
}

Report report(const MapSpec& map, const TheoremAOptions& options, const TheoremAResult& result) {
  Report r;
  r.experiment = "theorem_a";
  r.map = map_to_json(map);
  r.params = {{"samples", options.samples},
              {"max_entry", options.max_entry},
              {"horizon", options.horizon},
              {"initial_fraction", options.initial_fraction},
              {"min_width", options.min_width},
              {"min_entries", options.min_entries},
              {"schwarzian_grid", options.schwarzian_grid},
              {"seed", options.seed}};
  r.certified_Z = result.certified_Z(map.critical_value());
  json levels = json::array();
  for (const ZLevel& l : result.levels) {
    levels.push_back({{"width", l.width},
                      {"entries", l.entries},
                      {"max_schwarzian", l.max_schwarzian},
                      {"pass", l.pass},
                      {"worst", witness_json(l.worst)}});
  }
  if (result.certified) {
    const ZLevel& l = result.levels[*result.certified];
    r.fitted = {{"Z_width", l.width}, {"entries", l.entries}, {"max_schwarzian", l.max_schwarzian}};
    r.worst_witness = witness_json(l.worst);
  } else if (!result.levels.empty()) {
    r.worst_witness = witness_json(result.levels.back().worst);
    for (const ZLevel& l : result.levels) {
      if (l.max_schwarzian >= 0.0) ++r.violations;
    }
  }
  r.pass = result.certified.has_value() && result.recheck_failures == 0;
  r.details = {{"max_map_schwarzian", result.max_map_schwarzian},
               {"argmax", result.argmax},
               {"non_vacuous", result.non_vacuous()},
               {"critical_min_return", result.critical_min_return},
               {"verified_to_horizon", options.horizon},
               {"excluded", result.excluded},
               {"rechecked", result.rechecked},
               {"recheck_failures", result.recheck_failures},
               {"levels", levels}};
  r.csv_header = {"x", "entry_time", "image", "schwarzian"};
  r.csv_rows = result.rows;
  return r;
}

}  // namespace unimodal::verify
