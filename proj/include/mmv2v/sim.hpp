#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "mmv2v/analysis.hpp"
#include "mmv2v/channel.hpp"
#include "mmv2v/errors.hpp"
#include "mmv2v/scenario.hpp"

namespace mmv2v {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  return splitmix64(base ^ splitmix64(salt));
}

// Deterministic RNG with hand-rolled distributions so simulation output is
// reproducible bit-for-bit regardless of standard-library internals.
class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  bool bernoulli(double p) { return uniform() < p; }

  int poisson(double mean) {
    int k = 0;
    while (mean > 16.0) {
      k += poisson_small(16.0);
      mean -= 16.0;
    }
    return k + poisson_small(mean);
  }

 private:
  int poisson_small(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  std::mt19937_64 eng_;
};

struct Vehicle {
  int lane = 1;           // 1..3
  double y_m = 0.0;       // along-road position in [0, road_length)
  bool tall = false;      // truck/bus
  bool wants_tx = false;
  bool primary_tx = false;
  bool concurrent_tx = false;
};

// One random road realization. Positions live on a ring of length
// road_length_m (toroidal wrap) to avoid edge bias.
struct VehicleDrop {
  std::vector<Vehicle> vehicles;
  double road_length_m = 0.0;
  std::uint64_t seed = 0;
};

// Signed along-road displacement on the ring, in (-L/2, L/2].
inline double wrap_delta(double dy, double road_length) {
  dy = std::fmod(dy, road_length);
  if (dy > road_length / 2.0) dy -= road_length;
  if (dy <= -road_length / 2.0) dy += road_length;
  return dy;
}

// Samples per-lane Poisson vehicle counts with uniform independent positions
// and independent tall/passenger class marks. Overlaps are allowed unless a
// minimum gap is configured.
inline VehicleDrop drop_vehicles(const Scenario& s, double road_length_m,
                                 std::uint64_t seed) {
  if (!(road_length_m > 0.0))
    throw ValidationError("road_length", "must be > 0");
  SimRng rng(seed);
  VehicleDrop drop;
  drop.road_length_m = road_length_m;
  drop.seed = seed;
  for (int lane = 1; lane <= 3; ++lane) {
    const int n = rng.poisson(s.road.density(lane) * road_length_m);
    std::vector<Vehicle> lane_vehicles;
    lane_vehicles.reserve(n);
    for (int i = 0; i < n; ++i) {
      Vehicle v;
      v.lane = lane;
      v.y_m = rng.uniform() * road_length_m;
      v.tall = rng.bernoulli(s.road.tall_fraction);
      lane_vehicles.push_back(v);
    }
    std::sort(lane_vehicles.begin(), lane_vehicles.end(),
              [](const Vehicle& a, const Vehicle& b) { return a.y_m < b.y_m; });
    if (s.sim.min_gap_m > 0.0) {
      std::vector<Vehicle> kept;
      for (const Vehicle& v : lane_vehicles) {
        if (!kept.empty()) {
          const double body =
              ((v.tall ? s.tall.length_m : s.passenger.length_m) +
               (kept.back().tall ? s.tall.length_m : s.passenger.length_m)) / 2.0;
          if (v.y_m - kept.back().y_m < body + s.sim.min_gap_m) continue;
        }
        kept.push_back(v);
      }
      lane_vehicles = std::move(kept);
    }
    drop.vehicles.insert(drop.vehicles.end(), lane_vehicles.begin(),
                         lane_vehicles.end());
  }
  return drop;
}

// Marks transmitters. Every vehicle wants the channel with probability p_t;
// wanting vehicles are thinned to a hard-core set (Matern type II: a vehicle
// survives only if no wanting vehicle with a smaller uniform mark lies within
// Euclidean distance r_E, wrap-aware). Concurrent (collision) transmitters
// are drawn independently with probability p_c and ignore carrier sensing.
inline VehicleDrop select_transmitters(VehicleDrop drop, const Scenario& s,
                                       std::uint64_t seed) {
  SimRng rng(seed);
  const std::size_t n = drop.vehicles.size();
  std::vector<double> mark(n);
  std::vector<char> conc(n);
  for (std::size_t i = 0; i < n; ++i) {
    drop.vehicles[i].wants_tx = rng.bernoulli(s.mac.p_t);
    mark[i] = rng.uniform();
    conc[i] = rng.bernoulli(s.mac.p_c) ? 1 : 0;
  }

  std::vector<std::size_t> wanting;
  for (std::size_t i = 0; i < n; ++i)
    if (drop.vehicles[i].wants_tx) wanting.push_back(i);

  const double r_e = s.radio.carrier_sense_range_m;
  for (std::size_t a : wanting) {
    bool survives = true;
    for (std::size_t b : wanting) {
      if (b == a) continue;
      const bool lower_mark = mark[b] < mark[a] || (mark[b] == mark[a] && b < a);
      if (!lower_mark) continue;
      const double dx = std::abs(drop.vehicles[a].lane - drop.vehicles[b].lane) *
                        s.road.lane_width_m;
      const double dy =
          wrap_delta(drop.vehicles[a].y_m - drop.vehicles[b].y_m, drop.road_length_m);
      if (std::hypot(dx, dy) <= r_e) {
        survives = false;
        break;
      }
    }
    drop.vehicles[a].primary_tx = survives;
  }
  for (std::size_t i = 0; i < n; ++i)
    drop.vehicles[i].concurrent_tx = conc[i] != 0 && !drop.vehicles[i].primary_tx;
  return drop;
}

namespace detail {

// Per-lane sorted positions of tall vehicles, for O(log n) window counts.
struct TallIndex {
  std::array<std::vector<std::pair<double, std::size_t>>, 3> by_lane;

  explicit TallIndex(const VehicleDrop& drop) {
    for (std::size_t i = 0; i < drop.vehicles.size(); ++i) {
      const Vehicle& v = drop.vehicles[i];
      if (v.tall) by_lane[v.lane - 1].emplace_back(v.y_m, i);
    }
    for (auto& lane : by_lane) std::sort(lane.begin(), lane.end());
  }

  // Number of tall vehicles on `lane` with ring position in [start, start+len),
  // excluding up to two endpoint indices.
  int count(int lane, double start, double len, double road_length,
            std::size_t exclude_a, std::size_t exclude_b) const {
    if (len <= 0.0) return 0;
    len = std::min(len, road_length);
    start = std::fmod(start, road_length);
    if (start < 0.0) start += road_length;
    const auto& ys = by_lane[lane - 1];
    const auto count_range = [&](double lo, double hi) {
      const auto first = std::lower_bound(ys.begin(), ys.end(),
                                          std::make_pair(lo, std::size_t{0}));
      const auto last = std::lower_bound(ys.begin(), ys.end(),
                                         std::make_pair(hi, std::size_t{0}));
      int c = static_cast<int>(last - first);
      for (auto it = first; it != last; ++it)
        if (it->second == exclude_a || it->second == exclude_b) --c;
      return c;
    };
    const double end = start + len;
    if (end <= road_length) return count_range(start, end);
    return count_range(start, road_length) + count_range(0.0, end - road_length);
  }
};

// Blocker windows of one link, expressed as (lane, ring start, length).
struct BlockerWindow {
  int lane;
  double start;
  double length;
};

// The along-road windows in which a tall vehicle's center cuts the line of
// sight, mirroring the closed-form geometry: endpoint lanes use the
// half-width crossing strip (w2/2)(dy/dx) anchored at each endpoint, lanes in
// between use the full crossing strip extended by the blocker length, and
// same-lane links require the blocker body to fit between the endpoints.
inline int collect_windows(const Scenario& s, const VehicleDrop& drop,
                           std::size_t tx, std::size_t rx,
                           std::array<BlockerWindow, 3>& out) {
  const Vehicle& t = drop.vehicles[tx];
  const Vehicle& r = drop.vehicles[rx];
  const double l2 = s.tall.length_m;
  const double w2 = s.tall.width_m;
  const double delta = wrap_delta(r.y_m - t.y_m, drop.road_length_m);
  const double dy_abs = std::abs(delta);

  int n = 0;
  if (t.lane == r.lane) {
    if (dy_abs > l2) {
      const double lo = std::min(t.y_m, t.y_m + delta) + l2 / 2.0;
      out[n++] = {t.lane, lo, dy_abs - l2};
    }
    return n;
  }

  const double dx = std::abs(t.lane - r.lane) * s.road.lane_width_m;
  const double w_end = (w2 / 2.0) * (dy_abs / dx);
  if (w_end > 0.0) {
    out[n++] = {t.lane, delta > 0.0 ? t.y_m : t.y_m - w_end, w_end};
    out[n++] = {r.lane, delta > 0.0 ? t.y_m + delta - w_end : t.y_m + delta, w_end};
  }
  if (std::abs(t.lane - r.lane) == 2) {
    // Fractions of the segment inside the middle lane's +-w2/2 strip.
    const double t1 = (dx / 2.0 - w2 / 2.0) / dx;
    const double t2 = (dx / 2.0 + w2 / 2.0) / dx;
    const double u1 = std::min(t1 * delta, t2 * delta) - l2 / 2.0;
    const double u2 = std::max(t1 * delta, t2 * delta) + l2 / 2.0;
    out[n++] = {2, t.y_m + u1, u2 - u1};
  }
  return n;
}

}  // namespace detail

// Number of tall vehicles (excluding the endpoints) cutting the line of sight
// between two vehicles. Zero when both endpoints are tall, since their
// antennas sit above every blocker body.
inline int count_los_blockers(const VehicleDrop& drop, std::size_t tx_index,
                              std::size_t rx_index, const Scenario& s) {
  if (tx_index == rx_index)
    throw ValidationError("rx_index", "transmitter and receiver must differ");
  const Vehicle& t = drop.vehicles[tx_index];
  const Vehicle& r = drop.vehicles[rx_index];
  if (t.tall && r.tall) return 0;
  const detail::TallIndex index(drop);
  std::array<detail::BlockerWindow, 3> windows;
  const int n = detail::collect_windows(s, drop, tx_index, rx_index, windows);
  int count = 0;
  for (int i = 0; i < n; ++i)
    count += index.count(windows[i].lane, windows[i].start, windows[i].length,
                         drop.road_length_m, tx_index, rx_index);
  return count;
}

struct TrialStats {
  int covered_count = 0;
  std::vector<double> sinr_db;  // one entry per non-tagged vehicle
  double transmitter_density = 0.0;
  int primary_count = 0;
  int concurrent_count = 0;
  std::size_t tagged_index = 0;
};

namespace detail {

inline double link_power_mw(const Scenario& s, const VehicleDrop& drop,
                            const TallIndex& index, std::size_t tx, std::size_t rx) {
  const Vehicle& t = drop.vehicles[tx];
  const Vehicle& r = drop.vehicles[rx];
  const double dx = std::abs(t.lane - r.lane) * s.road.lane_width_m;
  double dy = wrap_delta(r.y_m - t.y_m, drop.road_length_m);
  if (dx == 0.0 && dy == 0.0) dy = 1e-3;  // coincident drop, keep loss finite

  int blockers = 0;
  if (!(t.tall && r.tall)) {
    std::array<BlockerWindow, 3> windows;
    const int n = collect_windows(s, drop, tx, rx, windows);
    for (int i = 0; i < n; ++i)
      blockers += index.count(windows[i].lane, windows[i].start, windows[i].length,
                              drop.road_length_m, tx, rx);
  }
  return received_power_k(s, std::min(blockers, 2), LinkGeometry{dx, dy});
}

}  // namespace detail

// Evaluates one realization: tags the primary transmitter nearest the road
// midpoint and computes every other vehicle's SINR against the sum of noise
// and the power of every other active transmitter. Links with two or more
// sampled blockers fall onto the heaviest path-loss row rather than being
// dropped.
inline TrialStats evaluate_trial(const VehicleDrop& drop, const Scenario& s) {
  std::vector<std::size_t> primaries;
  for (std::size_t i = 0; i < drop.vehicles.size(); ++i)
    if (drop.vehicles[i].primary_tx) primaries.push_back(i);
  if (primaries.empty()) throw SimError("no primary transmitter in drop");

  const double mid = drop.road_length_m / 2.0;
  std::size_t tagged = primaries[0];
  for (std::size_t i : primaries)
    if (std::abs(drop.vehicles[i].y_m - mid) <
        std::abs(drop.vehicles[tagged].y_m - mid))
      tagged = i;

  std::vector<std::size_t> interferers;
  for (std::size_t i = 0; i < drop.vehicles.size(); ++i) {
    if (i == tagged) continue;
    if (drop.vehicles[i].primary_tx || drop.vehicles[i].concurrent_tx)
      interferers.push_back(i);
  }

  const detail::TallIndex index(drop);
  const double noise = noise_power(s.radio);
  const double gamma = s.radio.sinr_threshold_linear();

  TrialStats stats;
  stats.tagged_index = tagged;
  stats.primary_count = static_cast<int>(primaries.size());
  for (const Vehicle& v : drop.vehicles)
    if (v.concurrent_tx) ++stats.concurrent_count;
  stats.transmitter_density =
      static_cast<double>(primaries.size()) / drop.road_length_m;
  stats.sinr_db.reserve(drop.vehicles.size() - 1);

  for (std::size_t v = 0; v < drop.vehicles.size(); ++v) {
    if (v == tagged) continue;
    const double signal = detail::link_power_mw(s, drop, index, tagged, v);
    double interference = 0.0;
    for (std::size_t t : interferers)
      if (t != v) interference += detail::link_power_mw(s, drop, index, t, v);
    const double sinr = signal / (noise + interference);
    stats.sinr_db.push_back(linear_to_db(sinr));
    if (sinr >= gamma) ++stats.covered_count;
  }
  return stats;
}

// One seeded trial: drop, transmitter selection, evaluation. Realizations
// without a primary transmitter are discarded and resampled a bounded number
// of times.
inline TrialStats trial_coverage(const Scenario& s, double road_length_m,
                                 std::uint64_t seed) {
  constexpr int kMaxAttempts = 10;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    VehicleDrop drop =
        drop_vehicles(s, road_length_m, derive_seed(seed, 2 * attempt));
    drop = select_transmitters(drop, s, derive_seed(seed, 2 * attempt + 1));
    bool any_primary = false;
    for (const Vehicle& v : drop.vehicles) any_primary |= v.primary_tx;
    if (!any_primary) continue;
    return evaluate_trial(drop, s);
  }
  throw SimError("no primary transmitter after 10 resampled drops; "
                 "p_t or the vehicle densities are too small");
}

struct CampaignStats {
  int trials = 0;
  double mean_covered = 0.0;
  double se_covered = 0.0;  // standard error of the mean
  double mean_transmitter_density = 0.0;
  std::vector<int> per_trial_covered;
  std::vector<double> pooled_top100;  // ascending, up to 100 per trial
};

namespace detail {

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 2;
  workers = std::min<std::size_t>(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

// Runs `trials` independent seeded trials and aggregates order-independently:
// per-trial seeds derive from the base seed and the trial index alone, and
// every aggregate is reduced in trial order.
inline CampaignStats run_campaign(const Scenario& s, int trials,
                                  double road_length_m, std::uint64_t base_seed) {
  if (trials < 1) throw ValidationError("trials", "must be >= 1");
  std::vector<TrialStats> results(trials);
  detail::parallel_for(static_cast<std::size_t>(trials), [&](std::size_t i) {
    results[i] = trial_coverage(s, road_length_m, derive_seed(base_seed, 1000003 + i));
  });

  CampaignStats out;
  out.trials = trials;
  out.per_trial_covered.reserve(trials);
  double sum = 0.0;
  double density_sum = 0.0;
  for (const TrialStats& t : results) {
    out.per_trial_covered.push_back(t.covered_count);
    sum += t.covered_count;
    density_sum += t.transmitter_density;
    std::vector<double> sinr = t.sinr_db;
    const std::size_t keep = std::min<std::size_t>(100, sinr.size());
    std::partial_sort(sinr.begin(), sinr.begin() + keep, sinr.end(),
                      std::greater<double>());
    out.pooled_top100.insert(out.pooled_top100.end(), sinr.begin(),
                             sinr.begin() + keep);
  }
  out.mean_covered = sum / trials;
  out.mean_transmitter_density = density_sum / trials;
  double ss = 0.0;
  for (int c : out.per_trial_covered) {
    const double d = c - out.mean_covered;
    ss += d * d;
  }
  out.se_covered = trials > 1 ? std::sqrt(ss / (trials - 1.0) / trials) : 0.0;
  std::sort(out.pooled_top100.begin(), out.pooled_top100.end());
  return out;
}

// Empirical CDF value of a sorted sample at x.
inline double empirical_cdf(const std::vector<double>& sorted_samples, double x) {
  if (sorted_samples.empty()) return 0.0;
  const auto it =
      std::upper_bound(sorted_samples.begin(), sorted_samples.end(), x);
  return static_cast<double>(it - sorted_samples.begin()) /
         static_cast<double>(sorted_samples.size());
}

// Two-sample Kolmogorov-Smirnov distance between sorted samples.
inline double ks_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (double x : a) d = std::max(d, std::abs(empirical_cdf(a, x) - empirical_cdf(b, x)));
  for (double x : b) d = std::max(d, std::abs(empirical_cdf(a, x) - empirical_cdf(b, x)));
  return d;
}

}  // namespace mmv2v
