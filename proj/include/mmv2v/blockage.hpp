#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "mmv2v/channel.hpp"
#include "mmv2v/errors.hpp"
#include "mmv2v/scenario.hpp"

namespace mmv2v {

// Distribution of the number of tall blockers on one link. The count is
// Poisson; p0/p1 are the 0- and 1-blocker probabilities and p_b0/p_b1 the
// link-level unblocked / one-blocker probabilities after accounting for the
// chance that both endpoints are themselves tall (antennas above all bodies).
struct BlockerDistribution {
  double mean = 0.0;
  double p0 = 1.0;
  double p1 = 0.0;
  double p_b0 = 1.0;
  double p_b1 = 0.0;
};

inline double poisson_pmf(double mean, int k) {
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  double p = std::exp(-mean);
  for (int i = 1; i <= k; ++i) p *= mean / i;
  return p;
}

inline BlockerDistribution make_blocker_distribution(double mean, double tall_fraction) {
  BlockerDistribution d;
  d.mean = mean;
  d.p0 = std::exp(-mean);
  d.p1 = mean * d.p0;
  const double both_tall = tall_fraction * tall_fraction;
  d.p_b0 = d.p0 + (1.0 - d.p0) * both_tall;
  d.p_b1 = d.p1 * (1.0 - both_tall);
  return d;
}

// Along-road window on the transmitter's (or receiver's) own lane in which a
// blocker on a cross-lane link can cut the line of sight: (w2/2) * (dy/dx).
inline double blocker_window_same_side(const LinkGeometry& geom,
                                       const VehicleClass& tall) {
  if (!(geom.dx_m > 0.0))
    throw ValidationError("geometry.dx_m",
                          "same-lane links use the dedicated branch");
  if (!(geom.dy_m > 0.0)) throw ValidationError("geometry.dy_m", "must be > 0");
  return (tall.width_m / 2.0) * (geom.dy_m / geom.dx_m);
}

// Along-road window on a lane strictly between transmitter and receiver:
// w2 * (dy/dx) + l2 (the blocker body extends the crossing strip).
inline double blocker_window_between(const LinkGeometry& geom,
                                     const VehicleClass& tall) {
  if (!(geom.dx_m > 0.0))
    throw ValidationError("geometry.dx_m",
                          "same-lane links use the dedicated branch");
  if (!(geom.dy_m > 0.0)) throw ValidationError("geometry.dy_m", "must be > 0");
  return tall.width_m * (geom.dy_m / geom.dx_m) + tall.length_m;
}

namespace detail {

// Poisson mean of the blocker count given the endpoint-lane density sum, the
// summed density of lanes in between, and the link geometry. Accepts dy >= 0
// so interferer links evaluated at lateral-only placements stay defined.
inline double blocker_mean(const Scenario& s, bool same_lane, double endpoint_density,
                           double between_density, double dx, double dy) {
  const double r = s.road.tall_fraction;
  if (same_lane) {
    return r * std::max(dy - s.tall.length_m, 0.0) * endpoint_density;
  }
  const double d_l1 = (s.tall.width_m / 2.0) * (dy / dx);
  const double d_l2 = s.tall.width_m * (dy / dx) + s.tall.length_m;
  return r * d_l1 * endpoint_density + r * d_l2 * between_density;
}

}  // namespace detail

// Blocker-count distribution for a link between two concrete lanes at
// along-road separation dy. Cross-lane counts convolve one Poisson for the
// endpoint lanes with one for the lanes in between; the convolution of
// Poissons is Poisson with the summed mean, which is what gets returned (the
// explicit convolution is kept as a test oracle).
inline BlockerDistribution blocker_count_distribution(const Scenario& s, int tx_lane,
                                                      int rx_lane, double dy) {
  if (tx_lane < 1 || tx_lane > 3)
    throw ValidationError("tx_lane", "lane index must be in {1,2,3}");
  if (rx_lane < 1 || rx_lane > 3)
    throw ValidationError("rx_lane", "lane index must be in {1,2,3}");
  if (!(dy > 0.0)) throw ValidationError("dy", "must be > 0");

  double mean = 0.0;
  if (tx_lane == rx_lane) {
    mean = detail::blocker_mean(s, true, s.road.density(tx_lane), 0.0, 0.0, dy);
  } else {
    const double dx = std::abs(tx_lane - rx_lane) * s.road.lane_width_m;
    const double endpoint = s.road.density(tx_lane) + s.road.density(rx_lane);
    double between = 0.0;
    for (int lane = std::min(tx_lane, rx_lane) + 1;
         lane < std::max(tx_lane, rx_lane); ++lane)
      between += s.road.density(lane);
    mean = detail::blocker_mean(s, false, endpoint, between, dx, dy);
  }
  return make_blocker_distribution(mean, s.road.tall_fraction);
}

// Blocker-count distribution keyed by lane offset only (0, W or 2W), with the
// endpoint densities averaged over the equally likely lane placements of that
// offset. This is the form used inside the lane-averaged interference power
// and the per-offset coverage reaches, where no concrete lane pair is bound.
inline BlockerDistribution blocker_count_distribution_offset(const Scenario& s,
                                                             int lane_offset,
                                                             double dy) {
  if (lane_offset < 0 || lane_offset > 2)
    throw ValidationError("lane_offset", "must be 0, 1 or 2 lane widths");
  if (!(dy >= 0.0)) throw ValidationError("dy", "must be >= 0");

  const auto& lam = s.road.lane_densities_per_m;
  double mean = 0.0;
  switch (lane_offset) {
    case 0:
      mean = detail::blocker_mean(s, true, (lam[0] + lam[1] + lam[2]) / 3.0, 0.0,
                                  0.0, dy);
      break;
    case 1:
      // Placements (1,2) and (2,3) are equally likely in either direction.
      mean = detail::blocker_mean(s, false, (lam[0] + 2.0 * lam[1] + lam[2]) / 2.0,
                                  0.0, s.road.lane_width_m, dy);
      break;
    default:
      mean = detail::blocker_mean(s, false, lam[0] + lam[2], lam[1],
                                  2.0 * s.road.lane_width_m, dy);
      break;
  }
  return make_blocker_distribution(mean, s.road.tall_fraction);
}

}  // namespace mmv2v
