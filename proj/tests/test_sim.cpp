#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "mmv2v/analysis.hpp"
#include "mmv2v/scenario.hpp"
#include "mmv2v/sim.hpp"

using namespace mmv2v;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const Scenario kDefault = default_scenario();

bool drops_equal(const VehicleDrop& a, const VehicleDrop& b) {
  if (a.vehicles.size() != b.vehicles.size()) return false;
  for (std::size_t i = 0; i < a.vehicles.size(); ++i) {
    const Vehicle &x = a.vehicles[i], &y = b.vehicles[i];
    if (x.lane != y.lane || x.y_m != y.y_m || x.tall != y.tall ||
        x.wants_tx != y.wants_tx || x.primary_tx != y.primary_tx ||
        x.concurrent_tx != y.concurrent_tx)
      return false;
  }
  return true;
}
}  // namespace

TEST_CASE("wrap_delta maps into the signed half-open ring interval") {
  CHECK(wrap_delta(10.0, 2000.0) == 10.0);
  CHECK(wrap_delta(1990.0, 2000.0) == -10.0);
  CHECK(wrap_delta(-1990.0, 2000.0) == 10.0);
  CHECK(wrap_delta(1000.0, 2000.0) == 1000.0);
  CHECK(wrap_delta(-1000.0, 2000.0) == 1000.0);
}

TEST_CASE("empty densities produce an empty drop") {
  Scenario s = kDefault;
  s.road.lane_densities_per_m = {0.0, 0.0, 0.0};
  CHECK(drop_vehicles(s, 2000.0, 7).vehicles.empty());
}

TEST_CASE("per-lane counts are Poisson with mean density times length") {
  const double road = 2000.0;
  const int trials = 1000;
  double total = 0.0;
  for (int i = 0; i < trials; ++i) {
    const VehicleDrop drop = drop_vehicles(kDefault, road, derive_seed(11, i));
    for (const Vehicle& v : drop.vehicles) total += v.lane == 2 ? 1.0 : 0.0;
  }
  const double mean = total / trials;
  // Poisson(200): sd of the trial mean is sqrt(200/1000).
  CHECK_THAT(mean, WithinAbs(200.0, 3.0 * std::sqrt(200.0 / trials)));
}

TEST_CASE("drops and trials are deterministic in the seed") {
  const VehicleDrop a = drop_vehicles(kDefault, 2000.0, 1234);
  const VehicleDrop b = drop_vehicles(kDefault, 2000.0, 1234);
  CHECK(drops_equal(a, b));
  CHECK_FALSE(drops_equal(a, drop_vehicles(kDefault, 2000.0, 1235)));

  Scenario s = kDefault;
  s.mac.p_t = 0.01;
  const TrialStats t1 = trial_coverage(s, 2000.0, 99);
  const TrialStats t2 = trial_coverage(s, 2000.0, 99);
  CHECK(t1.covered_count == t2.covered_count);
  CHECK(t1.sinr_db == t2.sinr_db);
  CHECK(t1.tagged_index == t2.tagged_index);
}

TEST_CASE("transmitter selection") {
  Scenario s = kDefault;
  s.mac.p_t = 0.05;

  SECTION("zero carrier-sense range lets every wanting vehicle transmit") {
    Scenario open = s;
    open.radio.carrier_sense_range_m = 0.0;
    const VehicleDrop drop = select_transmitters(
        drop_vehicles(open, 2000.0, 5), open, 6);
    for (const Vehicle& v : drop.vehicles) CHECK(v.primary_tx == v.wants_tx);
  }

  SECTION("a carrier-sense range covering the ring leaves at most one") {
    Scenario closed = s;
    closed.radio.carrier_sense_range_m = 3000.0;
    for (int i = 0; i < 20; ++i) {
      const VehicleDrop drop = select_transmitters(
          drop_vehicles(closed, 2000.0, derive_seed(21, i)), closed,
          derive_seed(22, i));
      int primaries = 0;
      for (const Vehicle& v : drop.vehicles) primaries += v.primary_tx;
      CHECK(primaries <= 1);
    }
  }

  SECTION("no two primaries ever sit within the carrier-sense range") {
    for (int i = 0; i < 50; ++i) {
      const VehicleDrop drop = select_transmitters(
          drop_vehicles(s, 2000.0, derive_seed(31, i)), s, derive_seed(32, i));
      std::vector<const Vehicle*> primaries;
      for (const Vehicle& v : drop.vehicles)
        if (v.primary_tx) primaries.push_back(&v);
      for (std::size_t a = 0; a < primaries.size(); ++a) {
        for (std::size_t b = a + 1; b < primaries.size(); ++b) {
          const double dx = std::abs(primaries[a]->lane - primaries[b]->lane) *
                            s.road.lane_width_m;
          const double dy =
              wrap_delta(primaries[a]->y_m - primaries[b]->y_m, 2000.0);
          REQUIRE(std::hypot(dx, dy) > s.radio.carrier_sense_range_m);
        }
      }
    }
  }

  SECTION("mean spacing approximates r_E plus the thinned Poisson gap") {
    const double expected =
        s.radio.carrier_sense_range_m + 1.0 / (s.mac.p_t * s.road.total_density());
    double gap_sum = 0.0;
    int gap_count = 0;
    for (int i = 0; i < 500; ++i) {
      const VehicleDrop drop = select_transmitters(
          drop_vehicles(s, 2000.0, derive_seed(41, i)), s, derive_seed(42, i));
      std::vector<double> ys;
      for (const Vehicle& v : drop.vehicles)
        if (v.primary_tx) ys.push_back(v.y_m);
      if (ys.size() < 2) continue;
      std::sort(ys.begin(), ys.end());
      for (std::size_t k = 1; k < ys.size(); ++k) {
        gap_sum += ys[k] - ys[k - 1];
        ++gap_count;
      }
      gap_sum += 2000.0 - ys.back() + ys.front();  // wrap gap
      ++gap_count;
    }
    REQUIRE(gap_count > 0);
    CHECK_THAT(gap_sum / gap_count, WithinRel(expected, 0.2));
  }

  SECTION("concurrent transmitters ignore carrier sensing but not primaries") {
    Scenario collisions = s;
    collisions.mac.p_c = 0.05;
    const VehicleDrop drop = select_transmitters(
        drop_vehicles(collisions, 2000.0, 51), collisions, 52);
    int concurrent = 0;
    for (const Vehicle& v : drop.vehicles) {
      if (v.concurrent_tx) {
        ++concurrent;
        CHECK_FALSE(v.primary_tx);
      }
    }
    CHECK(concurrent > 0);
  }
}

TEST_CASE("line-of-sight blocker counting") {
  VehicleDrop drop;
  drop.road_length_m = 1000.0;

  auto add = [&](int lane, double y, bool tall) {
    Vehicle v;
    v.lane = lane;
    v.y_m = y;
    v.tall = tall;
    drop.vehicles.push_back(v);
    return drop.vehicles.size() - 1;
  };

  SECTION("a tall vehicle strictly between two same-lane passengers blocks") {
    const auto tx = add(2, 100.0, false);
    const auto rx = add(2, 160.0, false);
    const auto blocker = add(2, 130.0, true);
    (void)blocker;
    CHECK(count_los_blockers(drop, tx, rx, kDefault) == 1);
  }

  SECTION("tall endpoints are never blocked") {
    const auto tx = add(2, 100.0, true);
    const auto rx = add(2, 160.0, true);
    add(2, 130.0, true);
    CHECK(count_los_blockers(drop, tx, rx, kDefault) == 0);
  }

  SECTION("blockers too close to a bumper do not cut a same-lane link") {
    const auto tx = add(2, 100.0, false);
    const auto rx = add(2, 160.0, false);
    add(2, 103.0, true);  // inside the l2/2 margin
    CHECK(count_los_blockers(drop, tx, rx, kDefault) == 0);
  }

  SECTION("adjacent-lane links are only cut inside the crossing windows") {
    const auto tx = add(1, 100.0, false);
    const auto rx = add(2, 160.0, false);
    // Crossing window on the transmitter lane spans (w2/2)(dy/dx) = 24.4 m.
    add(1, 110.0, true);  // inside
    CHECK(count_los_blockers(drop, tx, rx, kDefault) == 1);
    add(1, 140.0, true);  // beyond the window, cannot cut the segment
    CHECK(count_los_blockers(drop, tx, rx, kDefault) == 1);
    add(2, 150.0, true);  // inside the receiver-lane window
    CHECK(count_los_blockers(drop, tx, rx, kDefault) == 2);
  }

  SECTION("two-lane links pick up middle-lane blockers around the crossing") {
    const auto tx = add(1, 100.0, false);
    const auto rx = add(3, 160.0, false);
    add(2, 130.0, true);  // mid-crossing
    CHECK(count_los_blockers(drop, tx, rx, kDefault) == 1);
    add(2, 105.0, true);  // before the strip +- l2/2 window [111.3, 148.7]
    CHECK(count_los_blockers(drop, tx, rx, kDefault) == 1);
  }

  SECTION("links wrap around the ring edge") {
    const auto tx = add(2, 990.0, false);
    const auto rx = add(2, 30.0, false);  // 40 m ahead across the wrap
    add(2, 10.0, true);
    CHECK(count_los_blockers(drop, tx, rx, kDefault) == 1);
  }
}

TEST_CASE("a lone pair reproduces the analytic SINR") {
  Scenario s = kDefault;
  s.mac.p_t = 0.0;  // keep the analytic interference series empty
  s.mac.p_c = 0.0;
  s.road.tall_fraction = 0.0;

  VehicleDrop drop;
  drop.road_length_m = 2000.0;
  Vehicle tx;
  tx.lane = 2;
  tx.y_m = 900.0;
  tx.primary_tx = true;
  Vehicle rx;
  rx.lane = 2;
  rx.y_m = 1000.0;
  drop.vehicles = {tx, rx};

  const TrialStats stats = evaluate_trial(drop, s);
  REQUIRE(stats.sinr_db.size() == 1);
  CHECK_THAT(stats.sinr_db[0], WithinAbs(sinr_at(s, {0.0, 100.0}, 2, 2), 1e-9));
}

TEST_CASE("an unreachable threshold covers nobody") {
  Scenario s = kDefault;
  s.mac.p_t = 0.02;
  s.radio.sinr_threshold_db = 500.0;
  const TrialStats stats = trial_coverage(s, 2000.0, 3);
  CHECK(stats.covered_count == 0);
}

TEST_CASE("trials without any transmitter fail after bounded retries") {
  Scenario s = kDefault;
  s.mac.p_t = 0.0;
  CHECK_THROWS_AS(trial_coverage(s, 2000.0, 1), SimError);
}

TEST_CASE("campaign aggregation") {
  Scenario s = kDefault;
  s.mac.p_t = 0.01;

  SECTION("one trial aggregates to itself") {
    const CampaignStats c = run_campaign(s, 1, 2000.0, 77);
    const TrialStats t = trial_coverage(s, 2000.0, derive_seed(77, 1000003));
    CHECK(c.mean_covered == t.covered_count);
    CHECK(c.se_covered == 0.0);
    CHECK(c.pooled_top100.size() == std::min<std::size_t>(100, t.sinr_db.size()));
  }

  SECTION("identical seeds give identical aggregates") {
    const CampaignStats a = run_campaign(s, 20, 2000.0, 123);
    const CampaignStats b = run_campaign(s, 20, 2000.0, 123);
    CHECK(a.mean_covered == b.mean_covered);
    CHECK(a.pooled_top100 == b.pooled_top100);
    CHECK(a.per_trial_covered == b.per_trial_covered);
  }

  SECTION("disjoint seeds agree within pooled standard errors") {
    const CampaignStats a = run_campaign(s, 150, 2000.0, 1000);
    const CampaignStats b = run_campaign(s, 150, 2000.0, 2000);
    const double pooled =
        std::sqrt(a.se_covered * a.se_covered + b.se_covered * b.se_covered);
    CHECK(std::abs(a.mean_covered - b.mean_covered) < 3.0 * pooled);
  }
}

TEST_CASE("empirical cdf and Kolmogorov-Smirnov distance") {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  CHECK(empirical_cdf(a, 0.5) == 0.0);
  CHECK(empirical_cdf(a, 2.0) == 0.5);
  CHECK(empirical_cdf(a, 9.0) == 1.0);
  CHECK(ks_distance(a, a) == 0.0);
  const std::vector<double> b{10.0, 11.0, 12.0};
  CHECK(ks_distance(a, b) == 1.0);
}
