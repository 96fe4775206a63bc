#pragma once

#include <string>

#include "json.hpp"
#include "unimodal/map_model.hpp"
#include "unimodal/return_maps.hpp"

namespace unimodal {

/// Parses {"family", "params", "domain"} (plus "base" and "diffeo_coeffs" for
/// conjugated maps). Malformed input and unknown families raise an argument
/// error; a "domain" given for logistic or quadratic maps must match the
/// built-in invariant interval.
MapSpec map_from_json(const nlohmann::json& j);
MapSpec load_map(const std::string& path);

nlohmann::json map_to_json(const MapSpec& map);

nlohmann::json interval_to_json(const Interval& i);
Interval interval_from_json(const nlohmann::json& j);

/// {"branches": [{entry_time, domain, sign, is_central, extended}], "uncovered_measure", ...}.
nlohmann::json decomposition_to_json(const EntryMapDecomposition& decomp);

}  // namespace unimodal
