#include "unimodal/map_io.hpp"

#include <cmath>
#include <fstream>

#include "unimodal/error.hpp"

namespace unimodal {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::argument, std::string("map spec is missing \"") + key + "\"");
  }
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw Error(ErrorKind::argument, std::string("\"") + key + "\" must be a number");
  return v.get<double>();
}

std::vector<double> number_list(const json& v, const char* key) {
  if (!v.is_array() || v.empty()) throw Error(ErrorKind::argument, std::string("\"") + key + "\" must be a nonempty array");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw Error(ErrorKind::argument, std::string("\"") + key + "\" must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void check_domain(const json& j, const MapSpec& map) {
  if (!j.contains("domain")) return;
  const Interval given = interval_from_json(j.at("domain"));
  const Interval built = map.domain();
  const double tol = 1e-9 * std::max(1.0, built.length());
  if (std::abs(given.lo - built.lo) > tol || std::abs(given.hi - built.hi) > tol) {
    throw Error(ErrorKind::argument, "\"domain\" does not match the invariant interval of the family");
  }
}

std::vector<double> as_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

Interval interval_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorKind::argument, "interval must be [lo, hi]");
  }
  const Interval i{j[0].get<double>(), j[1].get<double>()};
  if (!(i.lo <= i.hi)) throw Error(ErrorKind::argument, "interval must satisfy lo <= hi");
  return i;
}

json interval_to_json(const Interval& i) { return json::array({i.lo, i.hi}); }

MapSpec map_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::argument, "map spec must be a JSON object");
  const json& fam = field(j, "family");
  if (!fam.is_string()) throw Error(ErrorKind::argument, "\"family\" must be a string");
  const std::string family = fam.get<std::string>();
  if (family == "logistic") {
    MapSpec m = MapSpec::logistic(number(field(j, "params"), "a"));
    check_domain(j, m);
    return m;
  }
  if (family == "quadratic") {
    MapSpec m = MapSpec::quadratic(number(field(j, "params"), "c"));
    check_domain(j, m);
    return m;
  }
  if (family == "polynomial") {
    const json& params = field(j, "params");
    return MapSpec::polynomial(number_list(field(params, "coeffs"), "coeffs"), interval_from_json(field(j, "domain")));
  }
  if (family == "conjugated") {
    const MapSpec base = map_from_json(field(j, "base"));
    MapSpec m = MapSpec::conjugated(base, number_list(field(j, "diffeo_coeffs"), "diffeo_coeffs"));
    check_domain(j, m);
    return m;
  }
  throw Error(ErrorKind::argument, "unknown map family \"" + family + "\"");
}

MapSpec load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::argument, "cannot open map file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::argument, "map file " + path + " is not valid JSON: " + e.what());
  }
  return map_from_json(j);
}

json map_to_json(const MapSpec& map) {
  json j;
  j["family"] = to_string(map.family());
  switch (map.family()) {
    case Family::logistic: j["params"] = {{"a", map.parameter()}}; break;
    case Family::quadratic: j["params"] = {{"c", map.parameter()}}; break;
    case Family::polynomial: j["params"] = {{"coeffs", as_vector(map.polynomial_part().coefficients())}}; break;
    case Family::conjugated:
      j["params"] = json::object();
      j["base"] = map_to_json(*map.base());
      j["diffeo_coeffs"] = as_vector(map.diffeo().coefficients());
      break;
  }
  j["domain"] = interval_to_json(map.domain());
  return j;
}

json decomposition_to_json(const EntryMapDecomposition& decomp) {
  json branches = json::array();
  for (const Branch& b : decomp.branches) {
    json e;
    e["entry_time"] = b.entry_time;
    e["domain"] = interval_to_json(b.domain);
    e["sign"] = b.sign;
    e["is_central"] = b.is_central;
    e["extended"] = b.extended_domain ? interval_to_json(*b.extended_domain) : json(nullptr);
    if (b.extended_range) e["extended_range"] = interval_to_json(*b.extended_range);
    branches.push_back(std::move(e));
  }
  json j;
  j["T"] = interval_to_json(decomp.T.T);
  j["depth"] = decomp.depth;
  j["partial"] = decomp.partial;
  j["branches"] = std::move(branches);
  j["uncovered_measure"] = decomp.uncovered_measure;
  return j;
}

}  // namespace unimodal
