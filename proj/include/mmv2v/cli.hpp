#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "mmv2v/analysis.hpp"
#include "mmv2v/config.hpp"
#include "mmv2v/csv.hpp"
#include "mmv2v/scenario.hpp"
#include "mmv2v/sim.hpp"
#include "mmv2v/svg.hpp"
#include "mmv2v/sweep.hpp"

namespace mmv2v {

namespace detail {

inline void stamp_scenario(CsvWriter& csv, const std::string& schema,
                           const Scenario& s) {
  csv.metadata("schema", schema);
  csv.metadata("scenario", scenario_to_json(s).dump());
}

}  // namespace detail

// Blockage-impact table: extra path loss of 1- and 2-blocker links over the
// unblocked row, plus the same-lane link blockage probabilities, per distance.
inline void cmd_blockage_curve(const Scenario& s, double d_min, double d_max,
                               double step, const std::string& out_path) {
  if (!(d_min > 0.0) || !(d_max >= d_min) || !(step > 0.0))
    throw ValidationError("distances", "need 0 < min <= max and step > 0");
  CsvWriter csv;
  detail::stamp_scenario(csv, "mmv2v.blockage-curve.v1", s);
  csv.header({"distance_m", "extra_pl_1_db", "extra_pl_2_db", "p_b0", "p_b1"});
  for (double d = d_min; d <= d_max + 1e-9; d += step) {
    const LinkGeometry geom{0.0, d};
    const double pl0 = path_loss_db(s.path_loss, 0, geom);
    const BlockerDistribution bd = blocker_count_distribution_offset(s, 0, d);
    csv.row({format_double(d),
             format_double(path_loss_db(s.path_loss, 1, geom) - pl0),
             format_double(path_loss_db(s.path_loss, 2, geom) - pl0),
             format_double(bd.p_b0), format_double(bd.p_b1)});
  }
  csv.write(out_path);
}

inline const char* sweep_parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::kBeamwidth: return "beamwidth_deg";
    case SweepParameter::kCarrierSenseRange: return "carrier_sense_range_m";
    case SweepParameter::kDensityRow: return "density_row";
    case SweepParameter::kSinrThreshold: return "sinr_threshold_db";
  }
  return "?";
}

// Coverage across a parameter grid crossed with traffic-condition rows.
inline void cmd_coverage_sweep(const Scenario& base, const SweepSpec& spec) {
  const auto results = run_coverage_sweep(base, spec);
  CsvWriter csv;
  detail::stamp_scenario(csv, "mmv2v.coverage-sweep.v1", base);
  csv.metadata("parameter", sweep_parameter_name(spec.parameter));
  if (spec.engine != Engine::kAnalytic) {
    csv.metadata("seed", std::to_string(spec.seed));
    csv.metadata("trials", std::to_string(spec.trials));
  }
  std::vector<std::string> cols{"parameter", "value", "density_row"};
  const bool analytic = spec.engine != Engine::kSimulation;
  const bool simulated = spec.engine != Engine::kAnalytic;
  if (analytic) cols.push_back("expected_receivers");
  if (simulated) {
    cols.push_back("mean_covered");
    cols.push_back("se_covered");
  }
  csv.header(cols);
  for (const auto& r : results) {
    std::vector<std::string> cells{sweep_parameter_name(spec.parameter), r.value,
                                   r.row};
    if (analytic) cells.push_back(format_double(*r.analytic));
    if (simulated) {
      cells.push_back(format_double(r.simulated->mean_covered));
      cells.push_back(format_double(r.simulated->se_covered));
    }
    csv.row(cells);
  }
  csv.write(spec.output_path);
}

// Pooled top-100 SINR empirical CDFs, one column per beamwidth, sampled on a
// fixed dB grid.
inline void cmd_sinr_cdf(const Scenario& base, const std::vector<double>& beamwidths,
                         int trials, std::uint64_t seed,
                         const std::string& out_path) {
  if (trials < 1) throw ValidationError("trials", "must be >= 1");
  if (beamwidths.empty()) throw ValidationError("beamwidths", "none given");
  constexpr double kGridMin = -30.0, kGridMax = 70.0, kGridStep = 0.5;

  std::vector<std::vector<double>> pooled(beamwidths.size());
  for (std::size_t i = 0; i < beamwidths.size(); ++i) {
    const Scenario swept = with_beamwidth(base, beamwidths[i]);
    pooled[i] = run_campaign(swept, trials, swept.sim.road_length_m,
                             derive_seed(seed, i))
                    .pooled_top100;
  }

  CsvWriter csv;
  detail::stamp_scenario(csv, "mmv2v.sinr-cdf.v1", base);
  csv.metadata("seed", std::to_string(seed));
  csv.metadata("trials", std::to_string(trials));
  std::vector<std::string> cols{"sinr_db"};
  for (double bw : beamwidths) cols.push_back("cdf_bw" + format_double(bw));
  csv.header(cols);
  for (double x = kGridMin; x <= kGridMax + 1e-9; x += kGridStep) {
    std::vector<std::string> cells{format_double(x)};
    for (const auto& samples : pooled)
      cells.push_back(format_double(empirical_cdf(samples, x)));
    csv.row(cells);
  }
  csv.write(out_path);
}

// Carrier-sensing-range sweep: per-broadcast coverage, transmitter density
// and the network-wide covered-receivers-per-meter aggregate.
inline void cmd_cs_sweep(const Scenario& base, const std::vector<double>& ranges,
                         Engine engine, int trials, std::uint64_t seed,
                         const std::string& out_path) {
  if (ranges.empty()) throw ValidationError("values", "no ranges given");
  for (double r : ranges)
    if (!(r >= 0.0)) throw ValidationError("values", "ranges must be >= 0");
  if (engine != Engine::kAnalytic && trials < 1)
    throw ValidationError("trials", "simulation sweeps need trials >= 1");

  const bool analytic = engine != Engine::kSimulation;
  const bool simulated = engine != Engine::kAnalytic;

  CsvWriter csv;
  detail::stamp_scenario(csv, "mmv2v.cs-sweep.v1", base);
  if (simulated) {
    csv.metadata("seed", std::to_string(seed));
    csv.metadata("trials", std::to_string(trials));
  }
  std::vector<std::string> cols{"carrier_sense_range_m"};
  if (analytic) {
    cols.insert(cols.end(), {"expected_receivers", "tx_density_analytic",
                             "covered_per_meter_analytic"});
  }
  if (simulated) {
    cols.insert(cols.end(), {"mean_covered", "se_covered", "tx_density_sim",
                             "covered_per_meter_sim"});
  }
  csv.header(cols);

  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const Scenario swept = with_carrier_sense_range(base, ranges[i]);
    std::vector<std::string> cells{format_double(ranges[i])};
    if (analytic) {
      const double coverage = expected_coverage(swept).expected_receivers;
      const double density = analytic_transmitter_density(swept);
      cells.push_back(format_double(coverage));
      cells.push_back(format_double(density));
      cells.push_back(format_double(coverage * density));
    }
    if (simulated) {
      const CampaignStats stats = run_campaign(
          swept, trials, swept.sim.road_length_m, derive_seed(seed, i));
      cells.push_back(format_double(stats.mean_covered));
      cells.push_back(format_double(stats.se_covered));
      cells.push_back(format_double(stats.mean_transmitter_density));
      cells.push_back(
          format_double(stats.mean_covered * stats.mean_transmitter_density));
    }
    csv.row(cells);
  }
  csv.write(out_path);
}

// Plain campaign run: per-trial coverage rows plus summary metadata, with an
// optional line-delimited records file for offline inspection.
inline void cmd_simulate(const Scenario& s, int trials, std::uint64_t seed,
                         const std::string& out_path,
                         const std::string& records_path = "") {
  if (trials < 1) throw ValidationError("trials", "must be >= 1");
  std::vector<TrialStats> results(trials);
  detail::parallel_for(static_cast<std::size_t>(trials), [&](std::size_t i) {
    results[i] =
        trial_coverage(s, s.sim.road_length_m, derive_seed(seed, 1000003 + i));
  });

  double sum = 0.0;
  for (const auto& t : results) sum += t.covered_count;

  CsvWriter csv;
  detail::stamp_scenario(csv, "mmv2v.simulate.v1", s);
  csv.metadata("seed", std::to_string(seed));
  csv.metadata("trials", std::to_string(trials));
  csv.metadata("mean_covered", format_double(sum / trials));
  csv.header({"trial", "covered_count", "primary_count", "concurrent_count",
              "tx_density_per_m", "top_sinr_db", "median_sinr_db"});
  for (int i = 0; i < trials; ++i) {
    const TrialStats& t = results[i];
    std::vector<double> sorted = t.sinr_db;
    std::sort(sorted.begin(), sorted.end());
    const double top = sorted.empty() ? 0.0 : sorted.back();
    const double median = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
    csv.row({std::to_string(i), std::to_string(t.covered_count),
             std::to_string(t.primary_count), std::to_string(t.concurrent_count),
             format_double(t.transmitter_density), format_double(top),
             format_double(median)});
  }
  csv.write(out_path);

  if (!records_path.empty()) {
    std::ofstream records(records_path, std::ios::binary);
    if (!records) throw IoError("cannot write " + records_path);
    for (int i = 0; i < trials; ++i) {
      const TrialStats& t = results[i];
      json rec;
      rec["trial"] = i;
      rec["covered_count"] = t.covered_count;
      rec["primary_count"] = t.primary_count;
      rec["concurrent_count"] = t.concurrent_count;
      rec["transmitter_density_per_m"] = t.transmitter_density;
      std::vector<double> sorted = t.sinr_db;
      std::sort(sorted.begin(), sorted.end(), std::greater<double>());
      if (sorted.size() > 100) sorted.resize(100);
      json arr = json::array();
      for (double v : sorted) arr.push_back(v);
      rec["top_sinr_db"] = std::move(arr);
      records << rec.dump() << "\n";
    }
  }
}

namespace detail {

inline std::vector<std::pair<double, double>> column_points(const CsvTable& t,
                                                            int x_col, int y_col) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    pts.emplace_back(t.number(r, x_col), t.number(r, y_col));
  return pts;
}

}  // namespace detail

// Renders a CSV produced by one of the commands above into a self-contained
// SVG. The CSV schema tag picks the layout; unknown or empty inputs are
// rejected.
inline void cmd_plot(const std::string& csv_path, const std::string& out_path) {
  const CsvTable t = read_csv(csv_path);
  const std::string schema = t.schema();
  if (schema.empty())
    throw ValidationError("csv.schema", "input carries no schema tag");
  if (t.rows.empty())
    throw ValidationError("csv.schema", "input has no data rows");

  std::string svg;
  if (schema == "mmv2v.blockage-curve.v1") {
    Panel loss{"extra path loss (dB)",
               {{"one blocker", detail::column_points(t, 0, t.column_index("extra_pl_1_db"))},
                {"two blockers", detail::column_points(t, 0, t.column_index("extra_pl_2_db"))}}};
    Panel prob{"link probability",
               {{"unblocked", detail::column_points(t, 0, t.column_index("p_b0"))},
                {"one blocker", detail::column_points(t, 0, t.column_index("p_b1"))}}};
    svg = render_chart("Blockage impact", "distance (m)", {loss, prob});
  } else if (schema == "mmv2v.coverage-sweep.v1") {
    Panel panel{"covered receivers", {}};
    // One series per density row and engine column.
    std::vector<std::string> rows;
    for (const auto& r : t.rows)
      if (std::find(rows.begin(), rows.end(), r[2]) == rows.end())
        rows.push_back(r[2]);
    for (const std::string& row : rows) {
      for (const char* col : {"expected_receivers", "mean_covered"}) {
        const int ci = t.column_index(col);
        if (ci < 0) continue;
        Series s;
        s.name = row + (std::string(col) == "expected_receivers" ? " (analytic)"
                                                                  : " (simulated)");
        for (std::size_t r = 0; r < t.rows.size(); ++r)
          if (t.rows[r][2] == row)
            s.points.emplace_back(t.number(r, 1), t.number(r, ci));
        panel.series.push_back(std::move(s));
      }
    }
    auto param = t.metadata.count("parameter") ? t.metadata.at("parameter")
                                               : std::string("value");
    svg = render_chart("Broadcast coverage sweep", param, {panel});
  } else if (schema == "mmv2v.sinr-cdf.v1") {
    Panel panel{"empirical CDF", {}};
    for (std::size_t c = 1; c < t.columns.size(); ++c) {
      Series s;
      s.name = t.columns[c].substr(std::string("cdf_bw").size()) + " deg";
      s.step = true;
      s.points = detail::column_points(t, 0, static_cast<int>(c));
      panel.series.push_back(std::move(s));
    }
    svg = render_chart("Top-100 receiver SINR", "SINR (dB)", {panel});
  } else if (schema == "mmv2v.cs-sweep.v1") {
    Panel cov{"covered receivers", {}};
    Panel agg{"covered per meter", {}};
    for (const auto& [col, label] :
         {std::pair<const char*, const char*>{"expected_receivers", "analytic"},
          {"mean_covered", "simulated"}}) {
      const int ci = t.column_index(col);
      if (ci >= 0) cov.series.push_back({label, detail::column_points(t, 0, ci)});
    }
    for (const auto& [col, label] :
         {std::pair<const char*, const char*>{"covered_per_meter_analytic",
                                              "analytic"},
          {"covered_per_meter_sim", "simulated"}}) {
      const int ci = t.column_index(col);
      if (ci >= 0) agg.series.push_back({label, detail::column_points(t, 0, ci)});
    }
    svg = render_chart("Carrier sensing range sweep", "carrier sense range (m)",
                       {cov, agg});
  } else if (schema == "mmv2v.simulate.v1") {
    Panel panel{"covered receivers",
                {{"per trial", detail::column_points(t, 0, 1)}}};
    svg = render_chart("Simulation campaign", "trial", {panel});
  } else {
    throw ValidationError("csv.schema", "unknown schema '" + schema + "'");
  }

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + out_path);
  out << svg;
  if (!out) throw IoError("failed writing " + out_path);
}

}  // namespace mmv2v
