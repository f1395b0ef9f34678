#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mmv2v/channel.hpp"
#include "mmv2v/scenario.hpp"
#include "mmv2v/units.hpp"

using namespace mmv2v;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("path loss spot values") {
  const PathLossTable table;
  CHECK_THAT(path_loss_db(table, 0, {0.0, 100.0}), WithinAbs(106.900, 1e-3));
  CHECK_THAT(path_loss_db(table, 0, {0.0, 1.0}), WithinAbs(70.015, 1e-3));
  CHECK_THAT(path_loss_db(table, 1, {3.2, 50.0}), WithinAbs(108.420, 1e-3));
}

TEST_CASE("path loss rejects bad inputs") {
  const PathLossTable table;
  CHECK_THROWS_AS(path_loss_db(table, 3, {0.0, 10.0}), ValidationError);
  CHECK_THROWS_AS(path_loss_db(table, -1, {0.0, 10.0}), ValidationError);
  CHECK_THROWS_AS(path_loss_db(table, 0, {0.0, 0.0}), ValidationError);
}

TEST_CASE("path loss increases with distance for every row") {
  const PathLossTable table;
  for (int k = 0; k < 3; ++k) {
    double prev = path_loss_db(table, k, {0.0, 1.0});
    for (double d = 2.0; d <= 300.0; d += 1.0) {
      const double cur = path_loss_db(table, k, {0.0, d});
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("one extra blocker costs 7 to 9 dB across the measured span") {
  const PathLossTable table;
  for (double d = 10.0; d <= 100.0; d += 0.5) {
    const double extra =
        path_loss_db(table, 1, {0.0, d}) - path_loss_db(table, 0, {0.0, d});
    CHECK(extra >= 7.0);
    CHECK(extra <= 9.0);
  }
}

TEST_CASE("antenna gain spot values") {
  auto [g1, g2] = antenna_gains(30.0, 0.1);
  CHECK_THAT(g1, WithinAbs(8.6705, 1e-4));
  CHECK_THAT(g2, WithinAbs(0.86705, 1e-4));

  CHECK_THAT(antenna_gains(360.0, 0.1).first, WithinAbs(1.0, 1e-12));
  CHECK_THAT(antenna_gains(360.0, 0.7).first, WithinAbs(1.0, 1e-12));

  auto [iso1, iso2] = antenna_gains(75.0, 1.0);
  CHECK_THAT(iso1, WithinAbs(1.0, 1e-12));
  CHECK_THAT(iso2, WithinAbs(1.0, 1e-12));
}

TEST_CASE("antenna gains reject out-of-range inputs") {
  CHECK_THROWS_AS(antenna_gains(0.0, 0.1), ValidationError);
  CHECK_THROWS_AS(antenna_gains(361.0, 0.1), ValidationError);
  CHECK_THROWS_AS(antenna_gains(30.0, 0.0), ValidationError);
  CHECK_THROWS_AS(antenna_gains(30.0, 1.5), ValidationError);
}

TEST_CASE("radiated power is independent of beamwidth") {
  for (int deg = 1; deg <= 360; ++deg) {
    for (double k : {0.01, 0.1, 0.5, 1.0}) {
      auto [g1, g2] = antenna_gains(deg, k);
      const double c = std::cos(deg_to_rad(deg) / 2.0);
      const double total = g1 * (1.0 - c) / 2.0 + g2 * (1.0 + c) / 2.0;
      REQUIRE_THAT(total, WithinAbs(1.0, 1e-12));
    }
  }
}

TEST_CASE("main gain never increases with beamwidth") {
  for (double k : {0.05, 0.1, 0.5}) {
    double prev = antenna_gains(1.0, k).first;
    for (int deg = 2; deg <= 360; ++deg) {
      const double cur = antenna_gains(deg, k).first;
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("lobe membership geometry") {
  const AntennaPattern p = make_antenna_pattern(30.0, 0.1);

  // Boresight link.
  CHECK(lobe_membership(p, {0.0, 50.0}, AntennaRole::kTransmitterFront) ==
        Lobe::kMain);
  // atan(3.2/50) = 3.66 deg, inside the 15 deg half-cone.
  CHECK(lobe_membership(p, {3.2, 50.0}, AntennaRole::kTransmitterFront) ==
        Lobe::kMain);
  CHECK(lobe_membership(p, {3.2, 50.0}, AntennaRole::kReceiverRear) == Lobe::kMain);
  // atan(3.2/10) = 17.7 deg, outside.
  CHECK(lobe_membership(p, {3.2, 10.0}, AntennaRole::kTransmitterFront) ==
        Lobe::kSide);
  // Receiver behind the transmitter.
  CHECK(lobe_membership(p, {0.0, -50.0}, AntennaRole::kTransmitterFront) ==
        Lobe::kSide);
  CHECK(lobe_membership(p, {3.2, 0.0}, AntennaRole::kTransmitterFront) ==
        Lobe::kSide);

  // The cone is closed: exactly alpha/2 off boresight is still main.
  const double dy = 3.2 / std::tan(deg_to_rad(15.0));
  CHECK(lobe_membership(p, {3.2, dy * (1.0 + 1e-9)},
                        AntennaRole::kTransmitterFront) == Lobe::kMain);
}

TEST_CASE("received power composes transmit power, gains and path loss") {
  const Scenario s = default_scenario();

  // Main-main boresight link at 100 m, cross-checked in dB arithmetic.
  const double p = received_power_k(s, 0, {0.0, 100.0});
  const double expected_dbm =
      23.0 + 2.0 * linear_to_db(s.antenna.main_gain) - 106.900;
  CHECK_THAT(mw_to_dbm(p), WithinAbs(expected_dbm, 1e-6));
  CHECK_THAT(mw_to_dbm(p), WithinAbs(-65.139, 1e-3));

  // Side-side coupling carries exactly ratio^2 of the main-main power at the
  // same path loss.
  const LinkGeometry off_cone{3.2, 10.0};
  const double side = received_power_k(s, 0, off_cone);
  const double main_same_pl = s.radio.tx_power_mw() * s.antenna.main_gain *
                              s.antenna.main_gain /
                              db_to_linear(path_loss_db(s.path_loss, 0, off_cone));
  CHECK_THAT(side / main_same_pl, WithinRel(0.01, 1e-12));

  // Two blockers cost at least 25 dB at 50 m.
  const double p0 = received_power_k(s, 0, {0.0, 50.0});
  const double p2 = received_power_k(s, 2, {0.0, 50.0});
  CHECK(linear_to_db(p0 / p2) >= 25.0);
}

TEST_CASE("received power decreases with distance along a fixed bearing") {
  const Scenario s = default_scenario();
  for (int k = 0; k < 3; ++k) {
    double prev = received_power_k(s, k, {0.0, 20.0});
    for (double d = 21.0; d <= 400.0; d += 1.0) {
      const double cur = received_power_k(s, k, {0.0, d});
      CHECK(cur < prev);
      prev = cur;
    }
  }
}
