#pragma once

#include <array>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmv2v/errors.hpp"
#include "mmv2v/scenario.hpp"

namespace mmv2v {

using json = nlohmann::ordered_json;

namespace detail {

inline void require_known_keys(const json& obj, const std::string& section,
                               std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    bool found = false;
    for (const char* k : known) {
      if (key == k) { found = true; break; }
    }
    if (!found) {
      const std::string path = section.empty() ? key : section + "." + key;
      throw ValidationError(path, "unknown key");
    }
  }
}

inline double get_number(const json& obj, const std::string& section,
                         const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number())
    throw ValidationError(section + "." + key, "expected a number");
  return v.get<double>();
}

inline bool get_bool(const json& obj, const std::string& section,
                     const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean())
    throw ValidationError(section + "." + key, "expected a boolean");
  return v.get<bool>();
}

template <std::size_t N>
std::array<double, N> get_array(const json& obj, const std::string& section,
                                const char* key, std::array<double, N> fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != N)
    throw ValidationError(section + "." + key,
                          "expected an array of " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number())
      throw ValidationError(section + "." + key, "expected numeric entries");
    out[i] = v[i].get<double>();
  }
  return out;
}

inline VehicleClass parse_vehicle_class(const json& obj, const std::string& section,
                                        const VehicleClass& defaults) {
  require_known_keys(obj, section,
                     {"length_m", "width_m", "height_m", "antenna_height_m"});
  VehicleClass v;
  v.length_m = get_number(obj, section, "length_m", defaults.length_m);
  v.width_m = get_number(obj, section, "width_m", defaults.width_m);
  v.height_m = get_number(obj, section, "height_m", defaults.height_m);
  v.antenna_height_m =
      get_number(obj, section, "antenna_height_m", defaults.antenna_height_m);
  return v;
}

}  // namespace detail

// Builds a Scenario from a parsed config document. Omitted keys take the
// canonical defaults; unknown keys are a hard error.
inline Scenario scenario_from_json(const json& root) {
  if (!root.is_object()) throw ParseError("config root must be an object");
  detail::require_known_keys(root, "",
                             {"road", "passenger", "tall", "radio", "mac",
                              "antenna", "path_loss", "analysis", "sim"});
  Scenario defaults;  // field defaults before MAC/antenna derivation
  Scenario s;

  const json empty = json::object();
  const json& road = root.contains("road") ? root.at("road") : empty;
  detail::require_known_keys(road, "road",
                             {"lane_width_m", "lane_count",
                              "lane_densities_per_m", "tall_fraction"});
  s.road.lane_width_m =
      detail::get_number(road, "road", "lane_width_m", defaults.road.lane_width_m);
  if (road.contains("lane_count")) {
    const json& lc = road.at("lane_count");
    if (!lc.is_number_integer())
      throw ValidationError("road.lane_count", "expected an integer");
    s.road.lane_count = lc.get<int>();
  }
  s.road.lane_densities_per_m = detail::get_array<3>(
      road, "road", "lane_densities_per_m", defaults.road.lane_densities_per_m);
  s.road.tall_fraction =
      detail::get_number(road, "road", "tall_fraction", defaults.road.tall_fraction);

  if (root.contains("passenger"))
    s.passenger = detail::parse_vehicle_class(root.at("passenger"), "passenger",
                                              defaults.passenger);
  if (root.contains("tall"))
    s.tall = detail::parse_vehicle_class(root.at("tall"), "tall", defaults.tall);

  const json& radio = root.contains("radio") ? root.at("radio") : empty;
  detail::require_known_keys(radio, "radio",
                             {"frequency_hz", "tx_power_dbm", "bandwidth_hz",
                              "noise_figure_db", "sinr_threshold_db",
                              "carrier_sense_range_m"});
  s.radio.frequency_hz =
      detail::get_number(radio, "radio", "frequency_hz", defaults.radio.frequency_hz);
  s.radio.tx_power_dbm =
      detail::get_number(radio, "radio", "tx_power_dbm", defaults.radio.tx_power_dbm);
  s.radio.bandwidth_hz =
      detail::get_number(radio, "radio", "bandwidth_hz", defaults.radio.bandwidth_hz);
  s.radio.noise_figure_db = detail::get_number(radio, "radio", "noise_figure_db",
                                               defaults.radio.noise_figure_db);
  s.radio.sinr_threshold_db = detail::get_number(
      radio, "radio", "sinr_threshold_db", defaults.radio.sinr_threshold_db);
  s.radio.carrier_sense_range_m =
      detail::get_number(radio, "radio", "carrier_sense_range_m",
                         defaults.radio.carrier_sense_range_m);

  const json& mac = root.contains("mac") ? root.at("mac") : empty;
  detail::require_known_keys(mac, "mac",
                             {"packet_interval_s", "tx_latency_s", "p_t", "p_c"});
  s.mac.packet_interval_s = detail::get_number(mac, "mac", "packet_interval_s",
                                               defaults.mac.packet_interval_s);
  s.mac.tx_latency_s =
      detail::get_number(mac, "mac", "tx_latency_s", defaults.mac.tx_latency_s);
  auto [p_t_fallback, p_c_fallback] = default_mac_probabilities(s.mac);
  s.mac.p_t = detail::get_number(mac, "mac", "p_t", p_t_fallback);
  // The p_c fallback squares the resolved p_t so an explicit p_t override
  // propagates into the default collision probability.
  s.mac.p_c = detail::get_number(mac, "mac", "p_c",
                                 mac.contains("p_t") ? s.mac.p_t * s.mac.p_t
                                                     : p_c_fallback);

  const json& ant = root.contains("antenna") ? root.at("antenna") : empty;
  detail::require_known_keys(ant, "antenna", {"beamwidth_deg", "side_main_ratio"});
  const double bw = detail::get_number(ant, "antenna", "beamwidth_deg",
                                       defaults.antenna.beamwidth_deg);
  const double ratio = detail::get_number(ant, "antenna", "side_main_ratio",
                                          defaults.antenna.side_main_ratio);
  s.antenna = make_antenna_pattern(bw, ratio);

  const json& pl = root.contains("path_loss") ? root.at("path_loss") : empty;
  detail::require_known_keys(pl, "path_loss",
                             {"alpha", "beta_db", "atmospheric_db_per_km"});
  s.path_loss.alpha =
      detail::get_array<3>(pl, "path_loss", "alpha", defaults.path_loss.alpha);
  s.path_loss.beta_db =
      detail::get_array<3>(pl, "path_loss", "beta_db", defaults.path_loss.beta_db);
  s.path_loss.atmospheric_db_per_km =
      detail::get_number(pl, "path_loss", "atmospheric_db_per_km",
                         defaults.path_loss.atmospheric_db_per_km);

  const json& an = root.contains("analysis") ? root.at("analysis") : empty;
  detail::require_known_keys(an, "analysis", {"receiver_lane_weighting"});
  s.analysis.receiver_lane_weighting =
      detail::get_bool(an, "analysis", "receiver_lane_weighting",
                       defaults.analysis.receiver_lane_weighting);

  const json& sim = root.contains("sim") ? root.at("sim") : empty;
  detail::require_known_keys(sim, "sim", {"road_length_m", "min_gap_m"});
  s.sim.road_length_m =
      detail::get_number(sim, "sim", "road_length_m", defaults.sim.road_length_m);
  s.sim.min_gap_m =
      detail::get_number(sim, "sim", "min_gap_m", defaults.sim.min_gap_m);

  validate(s);
  return s;
}

inline Scenario load_scenario(const std::string& config_text) {
  json root;
  try {
    root = json::parse(config_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config parse error: ") + e.what());
  }
  return scenario_from_json(root);
}

inline json scenario_to_json(const Scenario& s) {
  json root;
  root["road"] = {{"lane_width_m", s.road.lane_width_m},
                  {"lane_count", s.road.lane_count},
                  {"lane_densities_per_m", s.road.lane_densities_per_m},
                  {"tall_fraction", s.road.tall_fraction}};
  auto vehicle = [](const VehicleClass& v) {
    return json{{"length_m", v.length_m},
                {"width_m", v.width_m},
                {"height_m", v.height_m},
                {"antenna_height_m", v.antenna_height_m}};
  };
  root["passenger"] = vehicle(s.passenger);
  root["tall"] = vehicle(s.tall);
  root["radio"] = {{"frequency_hz", s.radio.frequency_hz},
                   {"tx_power_dbm", s.radio.tx_power_dbm},
                   {"bandwidth_hz", s.radio.bandwidth_hz},
                   {"noise_figure_db", s.radio.noise_figure_db},
                   {"sinr_threshold_db", s.radio.sinr_threshold_db},
                   {"carrier_sense_range_m", s.radio.carrier_sense_range_m}};
  root["mac"] = {{"packet_interval_s", s.mac.packet_interval_s},
                 {"tx_latency_s", s.mac.tx_latency_s},
                 {"p_t", s.mac.p_t},
                 {"p_c", s.mac.p_c}};
  root["antenna"] = {{"beamwidth_deg", s.antenna.beamwidth_deg},
                     {"side_main_ratio", s.antenna.side_main_ratio}};
  root["path_loss"] = {{"alpha", s.path_loss.alpha},
                       {"beta_db", s.path_loss.beta_db},
                       {"atmospheric_db_per_km", s.path_loss.atmospheric_db_per_km}};
  root["analysis"] = {{"receiver_lane_weighting", s.analysis.receiver_lane_weighting}};
  root["sim"] = {{"road_length_m", s.sim.road_length_m},
                 {"min_gap_m", s.sim.min_gap_m}};
  return root;
}

inline std::string serialize_scenario(const Scenario& s) {
  return scenario_to_json(s).dump(2);
}

// Applies one "section.key=value" override to a config document. The value is
// parsed as JSON when possible (numbers, arrays, booleans), else kept as a
// string. Unknown paths are rejected when the result is re-validated.
inline void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ParseError("override '" + assignment + "' is not of the form key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string value_text = assignment.substr(eq + 1);

  json value;
  try {
    value = json::parse(value_text);
  } catch (const nlohmann::json::parse_error&) {
    value = value_text;  // bare strings, e.g. density row names
  }

  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty())
      throw ParseError("override '" + assignment + "' has an empty path segment");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Loads a scenario from an optional config file plus key=value overrides.
// "road.lane_densities_per_m=low|intermediate|high" accepts a named traffic
// condition as shorthand for the corresponding density triple.
inline Scenario resolve_scenario(const std::string& config_path,
                                 const std::vector<std::string>& overrides) {
  json root = json::object();
  if (!config_path.empty()) {
    try {
      root = json::parse(read_text_file(config_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("config parse error: ") + e.what());
    }
  }
  for (const auto& o : overrides) apply_override(root, o);
  if (root.contains("road") && root["road"].contains("lane_densities_per_m") &&
      root["road"]["lane_densities_per_m"].is_string()) {
    root["road"]["lane_densities_per_m"] =
        density_row(root["road"]["lane_densities_per_m"].get<std::string>());
  }
  return scenario_from_json(root);
}

}  // namespace mmv2v
