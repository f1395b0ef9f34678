#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmv2v/cli.hpp"

namespace {

std::vector<double> parse_double_list(const std::string& text,
                                      const char* field) {
  std::vector<double> out;
  for (const std::string& token : mmv2v::parse_sweep_values(text)) {
    try {
      out.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw mmv2v::ValidationError(field, "expected a numeric list or range");
    }
  }
  return out;
}

std::vector<std::string> split_names(const std::string& text) {
  return mmv2v::parse_sweep_values(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mmv2v - coverage and interference toolkit for mmWave vehicle-to-vehicle "
      "broadcast: closed-form link budgets plus a Monte-Carlo road simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 1;
  int trials = 200;
  std::string engine_name = "analytic";
  std::string out_path;
  app.add_option("--config", config_path, "scenario config file (JSON)")
      ->envname("MMV2V_CONFIG");
  app.add_option("--set", overrides,
                 "override one config key, e.g. --set antenna.beamwidth_deg=60 "
                 "or --set road.lane_densities_per_m=high (repeatable)");
  app.add_option("--seed", seed, "base seed for all randomized commands");
  app.add_option("--trials", trials, "trials per simulated point");
  app.add_option("--engine", engine_name, "analytic, simulation or both");
  app.add_option("--out", out_path, "output file path");

  auto scenario = [&]() { return mmv2v::resolve_scenario(config_path, overrides); };
  auto require_out = [&]() {
    if (out_path.empty())
      throw mmv2v::ValidationError("out", "--out is required for this command");
    return out_path;
  };

  // blockage-curve
  double d_min = 1.0, d_max = 100.0, d_step = 1.0;
  auto* blockage = app.add_subcommand(
      "blockage-curve", "extra path loss and blockage probability vs distance");
  blockage->add_option("--dmin", d_min, "first distance (m)");
  blockage->add_option("--dmax", d_max, "last distance (m)");
  blockage->add_option("--step", d_step, "distance step (m)");
  blockage->callback([&] {
    mmv2v::cmd_blockage_curve(scenario(), d_min, d_max, d_step, require_out());
  });

  // coverage-sweep
  std::string param_name = "beamwidth";
  std::string values_text;
  std::string rows_text = "low,intermediate,high";
  auto* sweep = app.add_subcommand(
      "coverage-sweep", "broadcast coverage across a parameter grid");
  sweep->add_option("--param", param_name,
                    "beamwidth, carrier_sense_range, density_row or "
                    "sinr_threshold");
  sweep->add_option("--values", values_text, "list a,b,c or range start:stop:step")
      ->required();
  sweep->add_option("--rows", rows_text, "density rows to cross with");
  sweep->callback([&] {
    mmv2v::SweepSpec spec;
    spec.parameter = mmv2v::parse_sweep_parameter(param_name);
    spec.values = mmv2v::parse_sweep_values(values_text);
    spec.rows = split_names(rows_text);
    spec.engine = mmv2v::parse_engine(engine_name);
    spec.trials = trials;
    spec.seed = seed;
    spec.output_path = require_out();
    mmv2v::cmd_coverage_sweep(scenario(), spec);
  });

  // sinr-cdf
  std::string beamwidths_text;
  auto* cdf = app.add_subcommand("sinr-cdf",
                                 "pooled top-100 receiver SINR CDFs per beamwidth");
  cdf->add_option("--beamwidths", beamwidths_text, "beamwidth list in degrees")
      ->required();
  cdf->callback([&] {
    mmv2v::cmd_sinr_cdf(scenario(),
                        parse_double_list(beamwidths_text, "beamwidths"), trials,
                        seed, require_out());
  });

  // cs-sweep
  std::string ranges_text;
  auto* cs = app.add_subcommand(
      "cs-sweep", "coverage and aggregate throughput vs carrier sensing range");
  cs->add_option("--values", ranges_text, "range list a,b,c or start:stop:step")
      ->required();
  cs->callback([&] {
    mmv2v::cmd_cs_sweep(scenario(), parse_double_list(ranges_text, "values"),
                        mmv2v::parse_engine(engine_name), trials, seed,
                        require_out());
  });

  // simulate
  std::string records_path;
  auto* simulate = app.add_subcommand("simulate", "run a Monte-Carlo campaign");
  simulate->add_option("--records", records_path,
                       "optional per-trial records file (JSON lines)");
  simulate->callback([&] {
    mmv2v::cmd_simulate(scenario(), trials, seed, require_out(), records_path);
  });

  // plot
  std::string plot_in;
  auto* plot = app.add_subcommand("plot", "render a command's CSV as SVG");
  plot->add_option("--in", plot_in, "input CSV")->required();
  plot->callback([&] { mmv2v::cmd_plot(plot_in, require_out()); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const mmv2v::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mmv2v::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mmv2v::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const mmv2v::SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const mmv2v::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
