#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "fht/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fht: simulation and kernel estimation of first-hitting-time "
               "distributions for covariate-indexed Markov chains"};
  app.require_subcommand(1);

  fht::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "simulate a censored dataset");
  simulate->add_option("--model", sim.model, "builtin name (model-a, model-b) or spec file")
      ->required();
  simulate->add_option("--n", sim.n, "number of records")->required()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "random seed")->required();
  simulate->add_option("-o,--out", sim.out, "output dataset file")->required();
  simulate->add_option("--start", sim.start_label,
                       "force the initial state (1-based label)");

  fht::EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "fit the kernel estimator");
  estimate->add_option("--data", est.data, "dataset file")->required();
  estimate->add_option("--z", est.z, "query covariate values")->required();
  estimate->add_option("--k", est.k, "truncation order");
  estimate->add_option("--bandwidth", est.h,
                       "fixed bandwidth (default: tenfold CPE selection)");
  estimate->add_option("--cap", est.rate_cap, "rate estimate upper bound");
  estimate->add_option("--tmax", est.tmax, "time grid horizon");
  estimate->add_option("--tpoints", est.tpoints, "time grid size");
  estimate->add_option("--grid", est.bandwidth_grid, "bandwidth candidates");
  estimate->add_option("-o,--out", est.out, "output prefix")->required();

  fht::OracleOptions ora;
  auto* oracle = app.add_subcommand("oracle", "exact coefficients and density");
  oracle->add_option("--model", ora.model, "builtin name or spec file")->required();
  oracle->add_option("--z", ora.z, "covariate value")->required();
  oracle->add_option("--k", ora.k, "truncation order");
  oracle->add_option("--coeffs-out", ora.coeffs_out, "coefficient CSV path");
  oracle->add_option("--density-out", ora.density_out, "density CSV path");
  oracle->add_option("--tmax", ora.tmax, "time grid horizon");
  oracle->add_option("--tpoints", ora.tpoints, "time grid size");

  fht::BandwidthOptions bw;
  auto* bandwidth = app.add_subcommand("bandwidth", "tenfold CPE bandwidth selection");
  bandwidth->add_option("--data", bw.data, "dataset file")->required();
  bandwidth->add_option("--grid", bw.grid, "bandwidth candidates");
  bandwidth->add_flag("--proportional-folds", bw.proportional_folds,
                      "use n/10-sized folds instead of the 10-record blocks");
  bandwidth->add_option("-o,--out", bw.out, "output CSV (default: stdout)");

  fht::BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "replicated risk study");
  bench_cmd->add_option("--config", bench.config, "experiment config file")->required();
  bench_cmd->add_option("-o,--out-dir", bench.out_dir, "output directory")->required();
  auto* seed_opt = bench_cmd->add_option("--seed", bench.seed_override,
                                         "override the config master seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return fht::cmd_simulate(sim);
    if (estimate->parsed()) return fht::cmd_estimate(est);
    if (oracle->parsed()) return fht::cmd_oracle(ora);
    if (bandwidth->parsed()) return fht::cmd_bandwidth(bw);
    if (bench_cmd->parsed()) {
      bench.has_seed_override = seed_opt->count() > 0;
      return fht::cmd_bench(bench);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
