#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "unimodal/crossratio.hpp"
#include "unimodal/error.hpp"
#include "unimodal/map_io.hpp"
#include "unimodal/mdp.hpp"
#include "unimodal/return_maps.hpp"
#include "unimodal/verify.hpp"

namespace {

using nlohmann::json;
using namespace unimodal;

struct Common {
  std::string map_file;
  std::uint64_t seed = 1;
  std::optional<int> samples;
  std::optional<int> depth;
  std::optional<int> horizon;
  std::string out_dir;
  std::string format = "json";
};

void add_common(CLI::App* app, Common& c, bool needs_map = true) {
  auto* m = app->add_option("--map", c.map_file, "map specification JSON file");
  if (needs_map) m->required();
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--samples", c.samples, "sample budget");
  app->add_option("--depth", c.depth, "entry-time depth");
  app->add_option("--horizon", c.horizon, "niceness horizon");
  app->add_option("--out", c.out_dir, "write output into this directory instead of stdout");
  app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
}

Interval pair_interval(const std::vector<double>& v) { return {v.at(0), v.at(1)}; }

void emit(const Common& c, const std::string& name, const std::string& text) {
  if (c.out_dir.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::create_directories(c.out_dir);
  const auto path = std::filesystem::path(c.out_dir) / (name + (c.format == "csv" ? ".csv" : ".json"));
  std::ofstream(path) << text;
  std::cerr << "wrote " << path.string() << "\n";
}

void emit_json(const Common& c, const std::string& name, const json& j) { emit(c, name, verify::dump(j)); }

int emit_report(const Common& c, const verify::Report& r) {
  emit(c, r.experiment, c.format == "csv" ? verify::to_csv(r) : verify::dump(verify::to_json(r)));
  return r.pass ? 0 : 1;
}

json split_json(const SplitInterval& s) {
  return {{"M", interval_to_json(s.M())},
          {"J", interval_to_json(s.J())},
          {"M_minus", interval_to_json(s.M_minus())},
          {"M_plus", interval_to_json(s.M_plus())}};
}

json verdict_json(const MdpVerdict& v) {
  if (v.pass()) return {{"pass", true}, {"violation", nullptr}};
  return {{"pass", false}, {"violation", {v.violation->first, v.violation->second}}};
}

NiceInterval resolve_T(const MapSpec& map, const std::vector<double>& T, std::optional<double> point, int period,
                       int horizon) {
  if (!T.empty()) {
    const Interval t = pair_interval(T);
    const NicenessVerdict v = is_nice(map, t, horizon);
    return {t, horizon, v.min_gap};
  }
  if (point) return nice_from_periodic(map, *point, period, horizon);
  return verify::fixed_point_nice_interval(map, horizon);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schwarzian, cross-ratio and first-return-map toolkit for unimodal interval maps"};
  app.require_subcommand(1);

  Common c;
  double x = 0.0;
  int n = 1;
  std::vector<double> M, J, T;
  std::optional<double> point;
  int period = 1;
  double K = 0.99;
  bool extend = false;
  bool timing = false;
  std::string config;

  auto* schwarzian_cmd = app.add_subcommand("schwarzian", "jet and Schwarzian derivative of f^n at x");
  add_common(schwarzian_cmd, c);
  schwarzian_cmd->add_option("--x", x, "point")->required();
  schwarzian_cmd->add_option("--n", n, "iterate count");

  auto* cross_cmd = app.add_subcommand("cross-ratio", "cross-ratio distortion, Koebe check and sum terms");
  add_common(cross_cmd, c);
  cross_cmd->add_option("--M", M, "outer interval lo hi")->expected(2)->required();
  cross_cmd->add_option("--J", J, "inner interval lo hi")->expected(2)->required();
  cross_cmd->add_option("--n", n, "iterate count");

  auto* entry_cmd = app.add_subcommand("entry-map", "first entry map decomposition for a nice interval");
  add_common(entry_cmd, c);
  entry_cmd->add_option("--T", T, "nice interval lo hi (default: from the reversing fixed point)")->expected(2);
  entry_cmd->add_option("--point", point, "periodic point whose orbit bounds T");
  entry_cmd->add_option("--period", period, "period of --point");
  entry_cmd->add_flag("--extend", extend, "fill maximal monotone extensions of non-central branches");

  auto* nice_cmd = app.add_subcommand("nice", "niceness check or construction from a periodic orbit");
  add_common(nice_cmd, c);
  nice_cmd->add_option("--T", T, "interval lo hi")->expected(2);
  nice_cmd->add_option("--point", point, "periodic point");
  nice_cmd->add_option("--period", period, "period of --point");

  auto* renorm_cmd = app.add_subcommand("renorm", "renormalizability of the first return map to T");
  add_common(renorm_cmd, c);
  renorm_cmd->add_option("--T", T, "nice interval lo hi")->expected(2);
  renorm_cmd->add_option("--point", point, "periodic point whose orbit bounds T");
  renorm_cmd->add_option("--period", period, "period of --point");

  auto* mdp_cmd = app.add_subcommand("mdp", "margins disjointness along the orbit of a split");
  add_common(mdp_cmd, c);
  mdp_cmd->add_option("--M", M, "outer interval lo hi")->expected(2)->required();
  mdp_cmd->add_option("--J", J, "inner interval lo hi")->expected(2)->required();
  mdp_cmd->add_option("--n", n, "iterate count");

  auto* a_cmd = app.add_subcommand("verify-a", "negative Schwarzian of first entries near f(c)");
  add_common(a_cmd, c);
  auto* b_cmd = app.add_subcommand("verify-b", "cross-ratio lower bound exp(-C2 |f^n M|^2)");
  add_common(b_cmd, c);
  auto* c_cmd = app.add_subcommand("verify-c", "cross-ratio bound along orbits inside entry domains");
  add_common(c_cmd, c);
  c_cmd->add_option("--K", K, "target lower bound in (0, 1)");
  auto* tau_cmd = app.add_subcommand("tau1", "envelope of max |f^i V| against |f^n V|");
  add_common(tau_cmd, c);
  auto* probe_cmd = app.add_subcommand("probe-73", "central-domain ratios along the central cascade");
  add_common(probe_cmd, c);
  int levels = 5;
  probe_cmd->add_option("--levels", levels, "cascade length");

  auto* run_cmd = app.add_subcommand("run", "run the experiments of a config file");
  run_cmd->add_option("config", config, "config JSON")->required();
  run_cmd->add_option("--out", c.out_dir, "report directory")->required();
  run_cmd->add_flag("--timing", timing, "record runtime_ms (makes reports run-dependent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) {
      const auto outcome = verify::run_file(config, c.out_dir, timing);
      for (const auto& e : outcome.errors) std::cerr << e << "\n";
      for (const auto& r : outcome.reports) std::cerr << r.experiment << ": " << (r.pass ? "pass" : "fail") << "\n";
      return outcome.exit_code;
    }

    const MapSpec map = load_map(c.map_file);
    const int horizon = c.horizon.value_or(10000);
    const int depth = c.depth.value_or(20);

    if (schwarzian_cmd->parsed()) {
      const Jet3 j = eval_jet(map, x);
      json out{{"x", x}, {"n", n}, {"jet", {j.f0, j.f1, j.f2, j.f3}}};
      out["schwarzian"] = n == 1 ? schwarzian_at(map, x) : schwarzian_iterate(map, x, n);
      emit_json(c, "schwarzian", out);
      return 0;
    }
    if (cross_cmd->parsed()) {
      const SplitInterval s = SplitInterval::from_intervals(pair_interval(M), pair_interval(J));
      const CrossRatios cr = cross_ratios(s);
      const DistortionResult d = distortion(map, n, s);
      const KoebeReport k = koebe_check(map, n, s);
      const DistortionSums t = distortion_sums(map, n, s);
      json out{{"a", cr.a},
               {"b", cr.b},
               {"n", n},
               {"A", d.A},
               {"B", d.B},
               {"image", split_json(d.image_split)},
               {"koebe",
                {{"tau", k.tau}, {"C", k.C}, {"derivative_ratio", k.derivative_ratio}, {"bound", k.bound}, {"pass", k.pass}}},
               {"sum_margin_products", t.sum_margin_products},
               {"sum_squares", t.sum_squares}};
      emit_json(c, "cross_ratio", out);
      return 0;
    }
    if (entry_cmd->parsed()) {
      const NiceInterval nt = resolve_T(map, T, point, period, horizon);
      EntryMapDecomposition decomp = first_entry_decomposition(map, nt, depth);
      if (extend) {
        for (Branch& b : decomp.branches) {
          if (!b.is_central) b = extend_branch(map, b);
        }
      }
      if (c.format == "csv") {
        std::string text = "entry_time,lo,hi,sign,is_central\n";
        for (const Branch& b : decomp.branches) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d,%d\n", b.entry_time, b.domain.lo, b.domain.hi, b.sign,
                        b.is_central ? 1 : 0);
          text += buf;
        }
        emit(c, "entry_map", text);
      } else {
        emit_json(c, "entry_map", decomposition_to_json(decomp));
      }
      return 0;
    }
    if (nice_cmd->parsed()) {
      if (!T.empty()) {
        const NicenessVerdict v = is_nice(map, pair_interval(T), horizon);
        emit_json(c, "nice",
                  {{"T", T},
                   {"pass", v.pass},
                   {"failed_at", v.failed_at >= 0 ? json(v.failed_at) : json(nullptr)},
                   {"min_gap", std::isfinite(v.min_gap) ? json(v.min_gap) : json(nullptr)},
                   {"verified_to_horizon", horizon}});
        return v.pass ? 0 : 1;
      }
      const NiceInterval nt = point ? nice_from_periodic(map, *point, period, horizon)
                                    : verify::fixed_point_nice_interval(map, horizon);
      emit_json(c, "nice",
                {{"T", interval_to_json(nt.T)}, {"pass", true}, {"min_gap", nt.boundary_orbit_min_gap},
                 {"verified_to_horizon", horizon}});
      return 0;
    }
    if (renorm_cmd->parsed()) {
      const NiceInterval nt = resolve_T(map, T, point, period, horizon);
      const RenormalizationVerdict v = is_renormalizable(map, nt, depth);
      emit_json(c, "renorm",
                {{"T", interval_to_json(nt.T)},
                 {"verdict", to_string(v.verdict)},
                 {"period", v.period},
                 {"restrictive_interval", v.restrictive_interval ? interval_to_json(*v.restrictive_interval) : json(nullptr)},
                 {"image", v.image ? interval_to_json(*v.image) : json(nullptr)}});
      return 0;
    }
    if (mdp_cmd->parsed()) {
      const SplitInterval s = SplitInterval::from_intervals(pair_interval(M), pair_interval(J));
      const MdpOrbitVerdict v = check_mdp_orbit(map, s, n);
      json out{{"n", n}, {"reduced", verdict_json(v.reduced)}, {"full", verdict_json(v.full)}};
      if (v.full.pass()) {
        const MarginSumBound b = margin_sum_bound(orbit_collection(map, s, n), map.domain());
        out["margin_sum"] = {{"sum", b.sum}, {"bound", b.bound}, {"pass", b.pass}};
      }
      emit_json(c, "mdp", out);
      return v.full.pass() ? 0 : 1;
    }
    if (a_cmd->parsed()) {
      verify::TheoremAOptions o;
      o.seed = c.seed;
      if (c.samples) o.samples = *c.samples;
      if (c.horizon) o.horizon = *c.horizon;
      if (c.depth) o.max_entry = *c.depth;
      return emit_report(c, verify::report(map, o, verify::verify_theorem_a(map, o)));
    }
    if (b_cmd->parsed()) {
      verify::TheoremBOptions o;
      o.seed = c.seed;
      if (c.samples) o.samples = *c.samples;
      if (c.depth) o.max_n = *c.depth;
      return emit_report(c, verify::report(map, o, verify::verify_theorem_b(map, o)));
    }
    if (c_cmd->parsed()) {
      verify::TheoremCOptions o;
      o.seed = c.seed;
      o.K = K;
      if (c.samples) o.samples_per_level = *c.samples;
      if (c.depth) o.depth = *c.depth;
      if (c.horizon) o.horizon = *c.horizon;
      return emit_report(c, verify::report(map, o, verify::verify_theorem_c(map, o)));
    }
    if (tau_cmd->parsed()) {
      verify::Tau1Options o;
      o.seed = c.seed;
      if (c.samples) o.samples = *c.samples;
      if (c.depth) o.max_n = *c.depth;
      return emit_report(c, verify::report(map, o, verify::estimate_tau1(map, o)));
    }
    if (probe_cmd->parsed()) {
      verify::ProbeOptions o;
      o.levels = levels;
      if (c.depth) o.depth = *c.depth;
      if (c.horizon) o.horizon = *c.horizon;
      return emit_report(c, verify::report(map, o, verify::probe_central_ratio(map, o)));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::argument ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
