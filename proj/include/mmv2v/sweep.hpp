#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmv2v/analysis.hpp"
#include "mmv2v/csv.hpp"
#include "mmv2v/errors.hpp"
#include "mmv2v/scenario.hpp"
#include "mmv2v/sim.hpp"

namespace mmv2v {

enum class Engine { kAnalytic, kSimulation, kBoth };

inline Engine parse_engine(const std::string& name) {
  if (name == "analytic") return Engine::kAnalytic;
  if (name == "simulation") return Engine::kSimulation;
  if (name == "both") return Engine::kBoth;
  throw ValidationError("engine", "expected analytic, simulation or both");
}

enum class SweepParameter {
  kBeamwidth,
  kCarrierSenseRange,
  kDensityRow,
  kSinrThreshold,
};

inline SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "beamwidth") return SweepParameter::kBeamwidth;
  if (name == "carrier_sense_range") return SweepParameter::kCarrierSenseRange;
  if (name == "density_row") return SweepParameter::kDensityRow;
  if (name == "sinr_threshold") return SweepParameter::kSinrThreshold;
  throw ValidationError("parameter",
                        "expected beamwidth, carrier_sense_range, density_row "
                        "or sinr_threshold");
}

struct SweepSpec {
  SweepParameter parameter = SweepParameter::kBeamwidth;
  std::vector<std::string> values;  // numeric literals or density-row names
  std::vector<std::string> rows{"low", "intermediate", "high"};
  Engine engine = Engine::kAnalytic;
  int trials = 0;
  std::uint64_t seed = 0;
  std::string output_path;
};

// Expands "start:stop:step" or a comma-separated list into value tokens.
inline std::vector<std::string> parse_sweep_values(const std::string& text) {
  std::vector<std::string> out;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const auto colon2 = text.find(':', colon + 1);
    if (colon2 == std::string::npos)
      throw ValidationError("values", "range form is start:stop:step");
    const double start = std::stod(text.substr(0, colon));
    const double stop = std::stod(text.substr(colon + 1, colon2 - colon - 1));
    const double step = std::stod(text.substr(colon2 + 1));
    if (!(step > 0.0)) throw ValidationError("values", "step must be > 0");
    for (double v = start; v <= stop + 1e-9; v += step) out.push_back(format_double(v));
    if (out.empty()) throw ValidationError("values", "empty range");
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string token =
        text.substr(start, comma == std::string::npos ? std::string::npos
                                                      : comma - start);
    if (!token.empty()) out.push_back(token);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ValidationError("values", "no values given");
  return out;
}

inline void validate_spec(const SweepSpec& spec) {
  if (spec.values.empty()) throw ValidationError("values", "no values given");
  if (spec.engine != Engine::kAnalytic && spec.trials < 1)
    throw ValidationError("trials", "simulation sweeps need trials >= 1");
}

// Applies one swept value to a scenario copy.
inline Scenario apply_sweep_value(const Scenario& base, SweepParameter param,
                                  const std::string& value) {
  switch (param) {
    case SweepParameter::kBeamwidth:
      return with_beamwidth(base, std::stod(value));
    case SweepParameter::kCarrierSenseRange:
      return with_carrier_sense_range(base, std::stod(value));
    case SweepParameter::kDensityRow:
      return with_densities(base, density_row(value));
    case SweepParameter::kSinrThreshold: {
      Scenario s = base;
      s.radio.sinr_threshold_db = std::stod(value);
      return s;
    }
  }
  throw ValidationError("parameter", "unhandled sweep parameter");
}

struct SweepPointResult {
  std::string value;
  std::string row;
  std::optional<double> analytic;
  std::optional<CampaignStats> simulated;
};

// Evaluates a (value x density-row) grid. Point seeds derive from the base
// seed and the point's position in the grid, so results are independent of
// evaluation order.
inline std::vector<SweepPointResult> run_coverage_sweep(const Scenario& base,
                                                        const SweepSpec& spec) {
  validate_spec(spec);
  const bool cross_rows = spec.parameter != SweepParameter::kDensityRow;
  const std::vector<std::string> rows =
      cross_rows ? spec.rows : std::vector<std::string>{};

  struct Point {
    std::string value;
    std::string row;
    Scenario scn;
  };
  std::vector<Point> points;
  for (const std::string& v : spec.values) {
    Scenario swept = apply_sweep_value(base, spec.parameter, v);
    if (!cross_rows) {
      points.push_back({v, v, swept});
      continue;
    }
    for (const std::string& row : rows)
      points.push_back({v, row, with_densities(swept, density_row(row))});
  }

  std::vector<SweepPointResult> results(points.size());
  const bool analytic =
      spec.engine == Engine::kAnalytic || spec.engine == Engine::kBoth;
  const bool simulated =
      spec.engine == Engine::kSimulation || spec.engine == Engine::kBoth;

  if (analytic) {
    detail::parallel_for(points.size(), [&](std::size_t i) {
      results[i].analytic = expected_coverage(points[i].scn).expected_receivers;
    });
  }
  // Simulation points run sequentially; the campaign parallelizes trials.
  for (std::size_t i = 0; i < points.size(); ++i) {
    results[i].value = points[i].value;
    results[i].row = points[i].row;
    if (simulated)
      results[i].simulated =
          run_campaign(points[i].scn, spec.trials, points[i].scn.sim.road_length_m,
                       derive_seed(spec.seed, i));
  }
  return results;
}

// Mean spacing of carrier-sensed transmitters implied by the analysis;
// its reciprocal is the analytic transmitter density.
inline double analytic_transmitter_density(const Scenario& s) {
  const double rate = s.mac.p_t * s.road.total_density();
  if (rate <= 0.0) return 0.0;
  return 1.0 / (s.radio.carrier_sense_range_m + 1.0 / rate);
}

}  // namespace mmv2v
