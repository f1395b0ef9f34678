#pragma once

#include <cmath>

#include "mmv2v/errors.hpp"
#include "mmv2v/scenario.hpp"
#include "mmv2v/units.hpp"

namespace mmv2v {

// Planar displacement from transmitter to receiver. dx is the cross-road
// offset (always >= 0, a lane-width multiple for on-lane vehicles); dy is the
// along-road offset, positive when the receiver is ahead of the transmitter.
struct LinkGeometry {
  double dx_m = 0.0;
  double dy_m = 0.0;

  double distance() const { return std::hypot(dx_m, dy_m); }
};

// Path loss in dB for a link with k blockers:
//   10 * alpha_k * log10(d) + beta_k + 15 * d / 1000.
inline double path_loss_db(const PathLossTable& table, int blocker_count,
                           const LinkGeometry& geom) {
  if (blocker_count < 0 || blocker_count > 2)
    throw ValidationError("blocker_count", "path loss rows exist for k in {0,1,2}");
  const double d = geom.distance();
  if (!(d > 0.0)) throw ValidationError("geometry", "zero-length link");
  return 10.0 * table.alpha[blocker_count] * std::log10(d) +
         table.beta_db[blocker_count] +
         table.atmospheric_db_per_km * d / 1000.0;
}

enum class Lobe { kMain, kSide };
enum class AntennaRole { kTransmitterFront, kReceiverRear };

// Which lobe serves the link. The transmitter radiates from its front antenna
// (boresight +y), the receiver listens on its rear antenna (boresight -y), so
// both ends resolve to the main lobe exactly when the receiver is ahead of
// the transmitter and the off-boresight angle is within the cone. The cone is
// closed: an angle equal to half the beamwidth still counts as main.
inline Lobe lobe_membership(const AntennaPattern& pattern, const LinkGeometry& geom,
                            AntennaRole /*role*/) {
  if (!(geom.dy_m > 0.0)) return Lobe::kSide;
  const double theta = std::atan2(geom.dx_m, geom.dy_m);
  return theta <= deg_to_rad(pattern.beamwidth_deg) / 2.0 ? Lobe::kMain
                                                          : Lobe::kSide;
}

// Received power in milliwatts over a link with exactly k blockers:
//   P_t * G_t * G_r / PL_k   (all in linear magnitude).
inline double received_power_k(const Scenario& s, int blocker_count,
                               const LinkGeometry& geom) {
  const AntennaPattern& a = s.antenna;
  const double g_t =
      lobe_membership(a, geom, AntennaRole::kTransmitterFront) == Lobe::kMain
          ? a.main_gain
          : a.side_gain;
  const double g_r =
      lobe_membership(a, geom, AntennaRole::kReceiverRear) == Lobe::kMain
          ? a.main_gain
          : a.side_gain;
  const double pl_linear =
      db_to_linear(path_loss_db(s.path_loss, blocker_count, geom));
  return s.radio.tx_power_mw() * g_t * g_r / pl_linear;
}

}  // namespace mmv2v
