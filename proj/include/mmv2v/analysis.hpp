#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <utility>

#include "mmv2v/blockage.hpp"
#include "mmv2v/channel.hpp"
#include "mmv2v/errors.hpp"
#include "mmv2v/scenario.hpp"

namespace mmv2v {

// Thermal noise power in milliwatts: -174 dBm/Hz + 10 log10(B) + NF.
inline double noise_power(const RadioParams& radio) {
  if (!(radio.bandwidth_hz > 0.0))
    throw ValidationError("radio.bandwidth_hz", "must be > 0");
  return dbm_to_mw(-174.0 + 10.0 * std::log10(radio.bandwidth_hz) +
                   radio.noise_figure_db);
}

namespace detail {

inline double blended_power(const Scenario& s, const BlockerDistribution& bd,
                            const LinkGeometry& geom) {
  return bd.p_b0 * received_power_k(s, 0, geom) +
         bd.p_b1 * received_power_k(s, 1, geom);
}

}  // namespace detail

// Blockage-weighted received power for a concrete lane pair:
//   P_b0 * P_r0 + P_b1 * P_r1.
// Links with two or more blockers carry negligible power and are dropped.
inline double mean_received_power(const Scenario& s, int tx_lane, int rx_lane,
                                  const LinkGeometry& geom) {
  if (tx_lane < 1 || tx_lane > 3)
    throw ValidationError("tx_lane", "lane index must be in {1,2,3}");
  if (rx_lane < 1 || rx_lane > 3)
    throw ValidationError("rx_lane", "lane index must be in {1,2,3}");
  const double dy_abs = std::abs(geom.dy_m);
  double mean = 0.0;
  if (tx_lane == rx_lane) {
    mean = detail::blocker_mean(s, true, s.road.density(tx_lane), 0.0, 0.0, dy_abs);
  } else {
    const double dx = std::abs(tx_lane - rx_lane) * s.road.lane_width_m;
    const double endpoint = s.road.density(tx_lane) + s.road.density(rx_lane);
    double between = 0.0;
    for (int lane = std::min(tx_lane, rx_lane) + 1;
         lane < std::max(tx_lane, rx_lane); ++lane)
      between += s.road.density(lane);
    mean = detail::blocker_mean(s, false, endpoint, between, dx, dy_abs);
  }
  return detail::blended_power(
      s, make_blocker_distribution(mean, s.road.tall_fraction), geom);
}

// Same blend keyed by lane offset only, with endpoint densities averaged over
// the placements of that offset (used where no concrete lane pair is bound).
inline double mean_received_power_offset(const Scenario& s, int lane_offset,
                                         const LinkGeometry& geom) {
  const BlockerDistribution bd =
      blocker_count_distribution_offset(s, lane_offset, std::abs(geom.dy_m));
  return detail::blended_power(s, bd, geom);
}

// Expected power received from an interferer at line distance `l`, averaged
// over the equally likely lane placements: same lane with weight 1/3,
// adjacent lanes 4/9, two lanes apart 2/9. Placements whose lateral offset
// exceeds `l` are geometrically impossible and contribute zero.
inline double lane_averaged_interferer_power(const Scenario& s, double distance_m) {
  if (!(distance_m > 0.0)) throw ValidationError("distance", "must be > 0");
  const double w = s.road.lane_width_m;
  static constexpr std::array<double, 3> kWeights{1.0 / 3.0, 4.0 / 9.0, 2.0 / 9.0};
  double power = 0.0;
  for (int m = 0; m < 3; ++m) {
    const double dx = m * w;
    if (m == 0) {
      power += kWeights[0] * mean_received_power_offset(s, 0, {0.0, distance_m});
      continue;
    }
    const double arg = distance_m * distance_m - dx * dx;
    if (arg <= 0.0) continue;
    power += kWeights[m] *
             mean_received_power_offset(s, m, {dx, std::sqrt(arg)});
  }
  return power;
}

struct InterferenceSum {
  double power_mw = 0.0;
  int terms = 0;
};

namespace detail {

// Sums lane_averaged_interferer_power over interferer ranks k = 1, 2, ...
// placed at first_distance + (k-1) * spacing. Truncation is certified by the
// atmospheric term: one extra spacing step attenuates every later term by at
// least q = 10^(-atm * spacing / 10000), so the discarded tail is bounded by
// term * q / (1 - q). Termination is deferred until the distance has passed
// every lobe-membership transition, after which terms decay monotonically.
inline InterferenceSum sum_interferer_series(const Scenario& s, double first_distance,
                                             double spacing, double rel_tolerance) {
  constexpr int kMaxTerms = 10000;
  const double w = s.road.lane_width_m;
  const double half_bw_rad = deg_to_rad(s.antenna.beamwidth_deg) / 2.0;
  // Distance past which every placement offset is inside the main lobe (or
  // the beam is wide enough that no transition remains ahead).
  double settle = 2.0 * w;
  if (s.antenna.beamwidth_deg < 180.0)
    settle = std::max(settle, 2.0 * w / std::sin(half_bw_rad));

  const double q = std::pow(10.0, -s.path_loss.atmospheric_db_per_km * spacing / 10000.0);
  const double tail_factor = q < 1.0 ? q / (1.0 - q) : 0.0;

  InterferenceSum out;
  for (int k = 1; k <= kMaxTerms; ++k) {
    const double l = first_distance + static_cast<double>(k - 1) * spacing;
    const double term = lane_averaged_interferer_power(s, l);
    out.power_mw += term;
    out.terms = k;
    if (l < settle) continue;
    if (term == 0.0) return out;
    if (q < 1.0 && term * tail_factor < rel_tolerance * out.power_mw) return out;
  }
  throw ConvergenceError(rel_tolerance,
                         "interferer series did not meet the 1e-9 relative tail "
                         "tolerance within 10000 terms");
}

}  // namespace detail

// Total interference from carrier-sensed transmitters. The k-th nearest
// interferer sits at l_SR + k * (r_E + 1 / (p_t * sum(lambda))). Returns zero
// in the p_t -> 0 limit (interferers infinitely far apart).
inline InterferenceSum primary_interference(const Scenario& s, double link_distance_m) {
  if (!(link_distance_m >= 0.0))
    throw ValidationError("link_distance", "must be >= 0");
  const double rate = s.mac.p_t * s.road.total_density();
  if (rate <= 0.0) return {0.0, 0};
  const double spacing = s.radio.carrier_sense_range_m + 1.0 / rate;
  return detail::sum_interferer_series(s, link_distance_m + spacing, spacing, 1e-9);
}

// Total interference from concurrent (collision) transmitters, spaced
// k / (p_c * sum(lambda)) from the receiver. Zero when p_c is zero.
inline InterferenceSum secondary_interference(const Scenario& s) {
  const double rate = s.mac.p_c * s.road.total_density();
  if (rate <= 0.0) return {0.0, 0};
  const double spacing = 1.0 / rate;
  return detail::sum_interferer_series(s, spacing, spacing, 1e-9);
}

// Receiver-side power budget: noise, both interference series and the minimum
// received power needed to clear the SINR threshold.
struct InterferenceBudget {
  double noise_mw = 0.0;
  double primary_mw = 0.0;
  double secondary_mw = 0.0;
  double threshold_mw = 0.0;
  int terms_used = 0;
};

// P_r,th = (N + I_o + I_c) * gamma_th, with the primary series anchored at
// the given transmitter-receiver distance.
inline InterferenceBudget threshold_power(const Scenario& s, double link_distance_m) {
  InterferenceBudget b;
  b.noise_mw = noise_power(s.radio);
  const InterferenceSum io = primary_interference(s, link_distance_m);
  const InterferenceSum ic = secondary_interference(s);
  b.primary_mw = io.power_mw;
  b.secondary_mw = ic.power_mw;
  b.terms_used = io.terms + ic.terms;
  b.threshold_mw = (b.noise_mw + b.primary_mw + b.secondary_mw) *
                   s.radio.sinr_threshold_linear();
  return b;
}

namespace detail {

inline constexpr double kReachMin = 1.0;     // m, smallest probed separation
inline constexpr double kReachMax = 2000.0;  // m, beyond any valid budget
inline constexpr double kReachStep = 0.25;   // m, coarse scan resolution
inline constexpr double kReachTol = 0.01;    // m, bisection tolerance

}  // namespace detail

// Farthest along-road distance at the given lane offset whose blended power
// still meets the threshold. The blended power is not monotone across the
// side-to-main lobe transition, so the coarse scan walks down from the far
// end and the crossing it brackets is bisected to 0.01 m. Returns 0 when no
// probed distance qualifies and the scan cap (2000 m) when the far end is
// still covered.
//
// When a concrete lane pair is supplied the blockage blend binds to those
// lanes (their offset must match); otherwise the offset-averaged blend is
// used.
inline double coverage_reach(const Scenario& s, double threshold_mw, int lane_offset,
                             std::optional<std::pair<int, int>> lanes = std::nullopt) {
  if (!(threshold_mw > 0.0)) throw ValidationError("threshold", "must be > 0");
  if (lane_offset < 0 || lane_offset > 2)
    throw ValidationError("lane_offset", "must be 0, 1 or 2 lane widths");
  if (lanes && std::abs(lanes->first - lanes->second) != lane_offset)
    throw ValidationError("lane_offset", "does not match the lane pair");

  const double dx = lane_offset * s.road.lane_width_m;
  const auto power_at = [&](double dy) {
    const LinkGeometry geom{dx, dy};
    return lanes ? mean_received_power(s, lanes->first, lanes->second, geom)
                 : mean_received_power_offset(s, lane_offset, geom);
  };

  if (power_at(detail::kReachMax) >= threshold_mw) return detail::kReachMax;

  double above = -1.0;  // largest covered grid point
  double below = detail::kReachMax;
  for (double d = detail::kReachMax - detail::kReachStep; d >= detail::kReachMin;
       d -= detail::kReachStep) {
    if (power_at(d) >= threshold_mw) {
      above = d;
      break;
    }
    below = d;
  }
  if (above < 0.0) return 0.0;

  while (below - above > detail::kReachTol) {
    const double mid = 0.5 * (above + below);
    if (power_at(mid) >= threshold_mw)
      above = mid;
    else
      below = mid;
  }
  return 0.5 * (above + below);
}

// Along-road distance at which a receiver displaced by `lane_offset` lane
// widths enters the main lobe. Zero for the own lane and for beams of at
// least 180 degrees, whose cone spans every forward direction.
inline double cone_entry_distance(const Scenario& s, int lane_offset) {
  if (lane_offset <= 0 || s.antenna.beamwidth_deg >= 180.0) return 0.0;
  return lane_offset * s.road.lane_width_m /
         std::tan(deg_to_rad(s.antenna.beamwidth_deg) / 2.0);
}

// Per-offset coverage reaches and the expected number of receivers above the
// SINR threshold for one broadcast. covered_m is the along-road span of
// receivers the main lobe both points at and covers: reach minus the cone
// entry distance of the offset.
struct CoverageResult {
  std::array<double, 3> reach_m{0.0, 0.0, 0.0};    // lane offsets 0, W, 2W
  std::array<double, 3> covered_m{0.0, 0.0, 0.0};  // max(0, reach - cone entry)
  double expected_receivers = 0.0;
  InterferenceBudget budget;
};

// Expected broadcast coverage. The threshold uses a distance-independent
// budget with the primary series anchored at zero separation (interferers as
// close as the carrier-sensing spacing allows), then the three per-offset
// covered spans combine over the equally likely transmitter lanes: side-lane
// transmitters see receivers at offsets {0, W, 2W}, the middle lane at
// {0, W, W}. Cross-lane receivers closer than the cone entry distance are not
// pointed at by the main lobe and do not count, which is what collapses the
// coverage of very narrow beams. Each transmitter-lane term is weighted by
// that lane's density; the receiver_lane_weighting option swaps in the
// receiver lane's density.
inline CoverageResult expected_coverage(const Scenario& s) {
  CoverageResult out;
  out.budget = threshold_power(s, 0.0);
  for (int m = 0; m < 3; ++m) {
    out.reach_m[m] = coverage_reach(s, out.budget.threshold_mw, m);
    out.covered_m[m] =
        std::max(0.0, out.reach_m[m] - cone_entry_distance(s, m));
  }

  const auto& lam = s.road.lane_densities_per_m;
  const auto& d = out.covered_m;
  if (!s.analysis.receiver_lane_weighting) {
    out.expected_receivers = (lam[0] * (d[0] + d[1] + d[2]) +
                              lam[1] * (d[0] + 2.0 * d[1]) +
                              lam[2] * (d[0] + d[1] + d[2])) / 3.0;
  } else {
    out.expected_receivers = ((lam[0] * d[0] + lam[1] * d[1] + lam[2] * d[2]) +
                              (lam[1] * d[0] + (lam[0] + lam[2]) * d[1]) +
                              (lam[2] * d[0] + lam[1] * d[1] + lam[0] * d[2])) / 3.0;
  }
  return out;
}

// Receiver-side SINR in dB for one link, with the primary interference series
// anchored at the link's own length.
inline double sinr_at(const Scenario& s, const LinkGeometry& geom, int tx_lane,
                      int rx_lane) {
  const double signal = mean_received_power(s, tx_lane, rx_lane, geom);
  const double denom = noise_power(s.radio) +
                       primary_interference(s, geom.distance()).power_mw +
                       secondary_interference(s).power_mw;
  return linear_to_db(signal / denom);
}

}  // namespace mmv2v
