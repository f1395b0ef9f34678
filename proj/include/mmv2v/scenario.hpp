#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "mmv2v/errors.hpp"
#include "mmv2v/units.hpp"

namespace mmv2v {

// One vehicle class: body geometry plus rooftop antenna height.
struct VehicleClass {
  double length_m = 0.0;
  double width_m = 0.0;
  double height_m = 0.0;
  double antenna_height_m = 0.0;

  bool operator==(const VehicleClass&) const = default;
};

// Three-lane road with per-lane Poisson traffic. Lane indices are 1-based
// (1..3); lane i is centered at x = (i - 1) * lane_width_m.
struct RoadModel {
  double lane_width_m = 3.2;
  int lane_count = 3;
  std::array<double, 3> lane_densities_per_m{0.07, 0.10, 0.13};
  double tall_fraction = 0.1;

  double density(int lane) const { return lane_densities_per_m[lane - 1]; }
  double total_density() const {
    return lane_densities_per_m[0] + lane_densities_per_m[1] +
           lane_densities_per_m[2];
  }
  double lane_center_x(int lane) const { return (lane - 1) * lane_width_m; }

  bool operator==(const RoadModel&) const = default;
};

struct RadioParams {
  double frequency_hz = 60e9;
  double tx_power_dbm = 23.0;
  double bandwidth_hz = 20e6;
  double noise_figure_db = 6.0;
  double sinr_threshold_db = 23.0;
  double carrier_sense_range_m = 50.0;

  double tx_power_mw() const { return dbm_to_mw(tx_power_dbm); }
  double sinr_threshold_linear() const { return db_to_linear(sinr_threshold_db); }

  bool operator==(const RadioParams&) const = default;
};

// Channel-access probabilities. p_t and p_c come from an external MAC model;
// when absent from the config they fall back to default_mac_probabilities().
struct MacParams {
  double packet_interval_s = 0.1;
  double tx_latency_s = 100e-6;
  double p_t = 0.0;
  double p_c = 0.0;

  bool operator==(const MacParams&) const = default;
};

// Fallback channel-access probabilities: the fraction of time a node occupies
// the channel (ignoring backoff), and the first-order chance of two nodes
// picking the same instant. Both are overridable by explicit config values.
inline std::pair<double, double> default_mac_probabilities(const MacParams& mac) {
  if (mac.packet_interval_s <= 0.0)
    throw ValidationError("mac.packet_interval_s", "must be > 0");
  if (mac.tx_latency_s <= 0.0)
    throw ValidationError("mac.tx_latency_s", "must be > 0");
  const double p_t = mac.tx_latency_s / mac.packet_interval_s;
  return {p_t, p_t * p_t};
}

// Cone-plus-sphere radiation pattern: a conical main lobe of linear gain
// main_gain and an isotropic residual of gain side_gain = ratio * main_gain.
struct AntennaPattern {
  double beamwidth_deg = 30.0;
  double side_main_ratio = 0.1;
  double main_gain = 0.0;   // derived
  double side_gain = 0.0;   // derived

  bool operator==(const AntennaPattern&) const = default;
};

// Main/side lobe gains for a given beamwidth and side-to-main power ratio.
// Normalized so total radiated power is independent of beamwidth:
//   G1 * (1 - cos(a/2))/2 + G2 * (1 + cos(a/2))/2 == 1.
inline std::pair<double, double> antenna_gains(double beamwidth_deg,
                                               double side_main_ratio) {
  if (!(beamwidth_deg > 0.0) || !(beamwidth_deg <= 360.0))
    throw ValidationError("antenna.beamwidth_deg", "must be in (0, 360]");
  if (!(side_main_ratio > 0.0) || !(side_main_ratio <= 1.0))
    throw ValidationError("antenna.side_main_ratio", "must be in (0, 1]");
  const double c = std::cos(deg_to_rad(beamwidth_deg) / 2.0);
  const double g1 = 2.0 / ((1.0 - c) + side_main_ratio * (1.0 + c));
  return {g1, side_main_ratio * g1};
}

inline AntennaPattern make_antenna_pattern(double beamwidth_deg,
                                           double side_main_ratio) {
  auto [g1, g2] = antenna_gains(beamwidth_deg, side_main_ratio);
  return AntennaPattern{beamwidth_deg, side_main_ratio, g1, g2};
}

// Log-distance path loss rows per blocker count k in {0,1,2}, plus the fixed
// 60 GHz atmospheric attenuation slope.
struct PathLossTable {
  std::array<double, 3> alpha{1.77, 1.71, 0.635};
  std::array<double, 3> beta_db{70.0, 78.6, 115.0};
  double atmospheric_db_per_km = 15.0;

  bool operator==(const PathLossTable&) const = default;
};

struct AnalysisOptions {
  // When true, the expected-coverage lane weighting multiplies each reach by
  // the receiver lane's density instead of the transmitter lane's density.
  bool receiver_lane_weighting = false;

  bool operator==(const AnalysisOptions&) const = default;
};

struct SimOptions {
  double road_length_m = 2000.0;
  // Minimum bumper-to-bumper gap enforced when dropping vehicles; 0 keeps the
  // pure Poisson process (overlaps allowed, matching the analysis).
  double min_gap_m = 0.0;

  bool operator==(const SimOptions&) const = default;
};

// Full immutable parameter set. Safe to share across threads after loading.
struct Scenario {
  RoadModel road;
  VehicleClass passenger{5.0, 2.0, 1.6, 1.6};
  VehicleClass tall{13.0, 2.6, 3.0, 3.0};
  RadioParams radio;
  MacParams mac;
  AntennaPattern antenna;
  PathLossTable path_loss;
  AnalysisOptions analysis;
  SimOptions sim;

  bool operator==(const Scenario&) const = default;
};

namespace detail {

inline void validate_vehicle_class(const char* name, const VehicleClass& v) {
  const std::string prefix = std::string(name) + ".";
  if (!(v.length_m > 0.0)) throw ValidationError(prefix + "length_m", "must be > 0");
  if (!(v.width_m > 0.0)) throw ValidationError(prefix + "width_m", "must be > 0");
  if (!(v.height_m > 0.0)) throw ValidationError(prefix + "height_m", "must be > 0");
  if (!(v.antenna_height_m > 0.0))
    throw ValidationError(prefix + "antenna_height_m", "must be > 0");
}

}  // namespace detail

// Checks every invariant; throws ValidationError naming the violated field.
inline void validate(const Scenario& s) {
  if (!(s.road.lane_width_m > 0.0))
    throw ValidationError("road.lane_width_m", "must be > 0");
  if (s.road.lane_count != 3)
    throw ValidationError("road.lane_count", "must be 3 (the three-lane "
                          "placement probabilities are hard-coded)");
  for (int i = 0; i < 3; ++i) {
    if (!(s.road.lane_densities_per_m[i] >= 0.0))
      throw ValidationError("road.lane_densities_per_m", "entries must be >= 0");
  }
  if (!(s.road.tall_fraction >= 0.0 && s.road.tall_fraction <= 1.0))
    throw ValidationError("road.tall_fraction", "must be in [0, 1]");

  detail::validate_vehicle_class("passenger", s.passenger);
  detail::validate_vehicle_class("tall", s.tall);
  if (!(s.tall.height_m > s.passenger.antenna_height_m))
    throw ValidationError("tall.height_m",
                          "must exceed passenger.antenna_height_m, otherwise "
                          "tall vehicles cannot block the line of sight");

  if (!(s.radio.bandwidth_hz > 0.0))
    throw ValidationError("radio.bandwidth_hz", "must be > 0");
  if (!(s.radio.carrier_sense_range_m >= 0.0))
    throw ValidationError("radio.carrier_sense_range_m", "must be >= 0");
  if (!(s.radio.frequency_hz > 0.0))
    throw ValidationError("radio.frequency_hz", "must be > 0");

  if (!(s.mac.packet_interval_s > 0.0))
    throw ValidationError("mac.packet_interval_s", "must be > 0");
  if (!(s.mac.tx_latency_s > 0.0))
    throw ValidationError("mac.tx_latency_s", "must be > 0");
  if (!(s.mac.tx_latency_s <= s.mac.packet_interval_s))
    throw ValidationError("mac.tx_latency_s", "must not exceed mac.packet_interval_s");
  if (!(s.mac.p_t >= 0.0 && s.mac.p_t <= 1.0))
    throw ValidationError("mac.p_t", "must be in [0, 1]");
  if (!(s.mac.p_c >= 0.0 && s.mac.p_c <= 1.0))
    throw ValidationError("mac.p_c", "must be in [0, 1]");

  if (!(s.antenna.beamwidth_deg > 0.0 && s.antenna.beamwidth_deg <= 360.0))
    throw ValidationError("antenna.beamwidth_deg", "must be in (0, 360]");
  if (!(s.antenna.side_main_ratio > 0.0 && s.antenna.side_main_ratio <= 1.0))
    throw ValidationError("antenna.side_main_ratio", "must be in (0, 1]");
  if (!(s.antenna.main_gain >= s.antenna.side_gain))
    throw ValidationError("antenna.main_gain", "must be >= antenna.side_gain");

  if (!(s.path_loss.beta_db[0] < s.path_loss.beta_db[1] &&
        s.path_loss.beta_db[1] < s.path_loss.beta_db[2]))
    throw ValidationError("path_loss.beta_db",
                          "must be strictly increasing in blocker count");
  if (!(s.path_loss.atmospheric_db_per_km >= 0.0))
    throw ValidationError("path_loss.atmospheric_db_per_km", "must be >= 0");

  if (!(s.sim.road_length_m > 0.0))
    throw ValidationError("sim.road_length_m", "must be > 0");
  if (!(s.sim.min_gap_m >= 0.0))
    throw ValidationError("sim.min_gap_m", "must be >= 0");
}

// The canonical default scenario (also shipped as scenario.default).
inline Scenario default_scenario() {
  Scenario s;
  auto [p_t, p_c] = default_mac_probabilities(s.mac);
  s.mac.p_t = p_t;
  s.mac.p_c = p_c;
  s.antenna = make_antenna_pattern(s.antenna.beamwidth_deg, s.antenna.side_main_ratio);
  validate(s);
  return s;
}

// Table of traffic conditions: name -> per-lane densities (vehicles/m).
inline const std::array<std::pair<const char*, std::array<double, 3>>, 3>&
density_rows() {
  static const std::array<std::pair<const char*, std::array<double, 3>>, 3> rows{{
      {"low", {0.05, 0.07, 0.10}},
      {"intermediate", {0.07, 0.10, 0.13}},
      {"high", {0.09, 0.13, 0.17}},
  }};
  return rows;
}

inline std::array<double, 3> density_row(const std::string& name) {
  for (const auto& [row_name, densities] : density_rows()) {
    if (name == row_name) return densities;
  }
  throw ValidationError("road.lane_densities_per_m",
                        "unknown traffic condition '" + name +
                            "' (expected low, intermediate or high)");
}

// Convenience: a copy of `s` with a different beamwidth (gains re-derived).
inline Scenario with_beamwidth(Scenario s, double beamwidth_deg) {
  s.antenna = make_antenna_pattern(beamwidth_deg, s.antenna.side_main_ratio);
  return s;
}

inline Scenario with_densities(Scenario s, const std::array<double, 3>& lambdas) {
  s.road.lane_densities_per_m = lambdas;
  return s;
}

inline Scenario with_carrier_sense_range(Scenario s, double r_e_m) {
  s.radio.carrier_sense_range_m = r_e_m;
  return s;
}

}  // namespace mmv2v
