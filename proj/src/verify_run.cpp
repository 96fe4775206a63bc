#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>

#include "unimodal/error.hpp"
#include "unimodal/map_io.hpp"
#include "unimodal/verify.hpp"

namespace unimodal::verify {

using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reads the recognised keys of an experiment entry; anything else is an error.
class Fields {
 public:
  explicit Fields(const json& j) : j_(j) {}

  template <class T>
  void read(const char* key, T& target) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(std::string("\"") + key + "\" must be a boolean");
    } else {
      if (!v.is_number_integer()) throw ConfigError(std::string("\"") + key + "\" must be an integer");
      if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
        throw ConfigError(std::string("\"") + key + "\" must be nonnegative");
      }
    }
    target = v.get<T>();
  }

  void mark(const char* key) { seen_.insert(key); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown experiment key \"" + key + "\"");
    }
  }

 private:
  const json& j_;
  std::set<std::string> seen_;
};

MapSpec experiment_map(const json& e, const std::filesystem::path& base_dir) {
  if (e.contains("map")) return map_from_json(e.at("map"));
  if (e.contains("map_file") && e.at("map_file").is_string()) {
    std::filesystem::path path = e.at("map_file").get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    return load_map(path.string());
  }
  throw ConfigError("experiment needs \"map\" or \"map_file\"");
}

struct Planned {
  std::string type;
  MapSpec map;
  bool required = true;
  std::function<Report()> execute;
};

Planned plan(const json& e, std::uint64_t seed, const std::filesystem::path& base_dir) {
  if (!e.is_object()) throw ConfigError("each experiment must be an object");
  if (!e.contains("type") || !e.at("type").is_string()) throw ConfigError("experiment needs a string \"type\"");
  const std::string type = e.at("type").get<std::string>();
  MapSpec map = experiment_map(e, base_dir);
  Planned p{type, map, true, {}};
  Fields g(e);
  g.mark("type");
  g.mark("map");
  g.mark("map_file");
  g.read("seed", seed);
  g.read("required", p.required);
  if (type == "theorem_a") {
    TheoremAOptions o;
    o.seed = seed;
    g.read("samples", o.samples);
    g.read("max_entry", o.max_entry);
    g.read("horizon", o.horizon);
    g.read("initial_fraction", o.initial_fraction);
    g.read("min_width", o.min_width);
    g.read("min_entries", o.min_entries);
    g.read("schwarzian_grid", o.schwarzian_grid);
    p.execute = [m = map, o] { return report(m, o, verify_theorem_a(m, o)); };
  } else if (type == "theorem_b") {
    TheoremBOptions o;
    o.seed = seed;
    g.read("samples", o.samples);
    g.read("max_n", o.max_n);
    g.read("min_radius", o.min_radius);
    g.read("max_radius", o.max_radius);
    g.read("min_margin", o.min_margin);
    g.read("stability", o.stability);
    g.read("holdout_margin", o.holdout_margin);
    p.execute = [m = map, o] { return report(m, o, verify_theorem_b(m, o)); };
  } else if (type == "theorem_c") {
    TheoremCOptions o;
    o.seed = seed;
    g.read("K", o.K);
    g.read("levels", o.levels);
    g.read("samples", o.samples_per_level);
    g.read("max_n", o.max_n);
    g.read("depth", o.depth);
    g.read("horizon", o.horizon);
    g.read("min_samples", o.min_samples);
    p.execute = [m = map, o] { return report(m, o, verify_theorem_c(m, o)); };
  } else if (type == "tau1") {
    Tau1Options o;
    o.seed = seed;
    g.read("samples", o.samples);
    g.read("max_n", o.max_n);
    g.read("small_bin", o.small_bin);
    p.execute = [m = map, o] { return report(m, o, estimate_tau1(m, o)); };
  } else if (type == "probe_central_ratio") {
    ProbeOptions o;
    g.read("levels", o.levels);
    g.read("depth", o.depth);
    g.read("horizon", o.horizon);
    p.execute = [m = map, o] { return report(m, o, probe_central_ratio(m, o)); };
  } else if (type == "derivative_bound") {
    DerivativeBoundOptions o;
    o.seed = seed;
    g.read("samples", o.samples);
    g.read("max_n", o.max_n);
    g.read("grid", o.grid);
    g.read("stability", o.stability);
    p.execute = [m = map, o] { return report(m, o, fit_derivative_bound(m, o)); };
  } else {
    throw ConfigError("unknown experiment type \"" + type + "\"");
  }
  g.finish();
  return p;
}

}  // namespace

RunOutcome run(const json& config, const std::string& out_dir, bool timing, const std::string& base_dir) {
  RunOutcome out;
  std::vector<Planned> planned;
  try {
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    std::uint64_t seed = 1;
    if (config.contains("seed")) {
      const json& v = config.at("seed");
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw ConfigError("\"seed\" must be a nonnegative integer");
      }
      seed = config.at("seed").get<std::uint64_t>();
    }
    if (config.contains("timing")) {
      if (!config.at("timing").is_boolean()) throw ConfigError("\"timing\" must be a boolean");
      timing = timing || config.at("timing").get<bool>();
    }
    if (!config.contains("experiments") || !config.at("experiments").is_array()) {
      throw ConfigError("config needs an \"experiments\" array");
    }
    for (const json& e : config.at("experiments")) planned.push_back(plan(e, seed, base_dir));
  } catch (const ConfigError& e) {
    out.exit_code = 2;
    out.errors.push_back(e.what());
    return out;
  } catch (const Error& e) {
    out.exit_code = 2;
    out.errors.push_back(e.what());
    return out;
  } catch (const json::exception& e) {
    out.exit_code = 2;
    out.errors.push_back(e.what());
    return out;
  }

  std::filesystem::create_directories(out_dir);
  for (std::size_t i = 0; i < planned.size(); ++i) {
    const Planned& p = planned[i];
    Report r;
    const auto start = std::chrono::steady_clock::now();
    try {
      r = p.execute();
    } catch (const Error& e) {
      r.experiment = p.type;
      r.map = map_to_json(p.map);
      r.pass = false;
      r.details = {{"error", e.what()}};
      out.errors.push_back(p.type + ": " + e.what());
    }
    if (timing) {
      r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    char stem[64];
    std::snprintf(stem, sizeof stem, "%02zu_%s", i, p.type.c_str());
    const std::filesystem::path base = std::filesystem::path(out_dir) / stem;
    std::ofstream(base.string() + ".json") << dump(to_json(r));
    if (!r.csv_rows.empty()) std::ofstream(base.string() + ".csv") << to_csv(r);
    if (p.required && !r.pass) out.exit_code = 1;
    out.reports.push_back(std::move(r));
  }
  return out;
}

RunOutcome run_file(const std::string& config_path, const std::string& out_dir, bool timing) {
  std::ifstream in(config_path);
  if (!in) return {2, {}, {"cannot open config " + config_path}};
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    return {2, {}, {std::string("config is not valid JSON: ") + e.what()}};
  }
  return run(config, out_dir, timing, std::filesystem::path(config_path).parent_path().string());
}

}  // namespace unimodal::verify
