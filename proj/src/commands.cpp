#include "fht/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "fht/bandwidth.hpp"
#include "fht/estimator.hpp"
#include "fht/io.hpp"
#include "fht/model.hpp"
#include "fht/oracle.hpp"
#include "fht/risk.hpp"

namespace fht {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_manifest(const std::string& path, const std::string& command,
                    const json& params, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs,
                    double duration_seconds) {
  json m;
  m["artifact"] = "fht";
  m["artifact_version"] = kArtifactVersion;
  m["command"] = command;
  m["params"] = params;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["duration_seconds"] = duration_seconds;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest '" + path + "'");
  out << m.dump(2) << "\n";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file '" + path + "'");
  return out;
}

std::string labels_csv_field(const std::vector<int>& states) {
  std::string joined;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i) joined += ',';
    joined += std::to_string(states[i] + 1);
  }
  return '"' + joined + '"';
}

}  // namespace

int cmd_simulate(const SimulateOptions& opt) {
  const auto start = Clock::now();
  const ModelSpec spec = load_model(opt.model);

  const auto violations = validate_model(spec, default_validation_grid(spec));
  if (!violations.empty())
    throw ConfigError("model '" + opt.model + "' fails validation: " +
                      violations.front().what);

  Rng rng(opt.seed);
  Dataset ds;
  if (opt.start_label > 0) {
    ds.covariate_dim = spec.covariate_dim;
    ds.n_states = spec.n_states;
    ds.model_name = spec.name;
    for (int i = 0; i < opt.n; ++i) {
      const double z = spec.covariate.sample(rng);
      ds.records.push_back(
          simulate_trajectory(spec, z, rng, opt.start_label - 1));
    }
  } else {
    ds = simulate_dataset(spec, opt.n, rng);
  }
  ds.seed = opt.seed;
  write_dataset_file(opt.out, ds);

  json params{{"model", opt.model}, {"n", opt.n}, {"seed", opt.seed}};
  if (opt.start_label > 0) params["start"] = opt.start_label;
  write_manifest(opt.out + ".manifest.json", "simulate", params,
                 opt.model == "model-a" || opt.model == "model-b"
                     ? std::vector<std::string>{}
                     : std::vector<std::string>{opt.model},
                 {opt.out}, seconds_since(start));
  return 0;
}

int cmd_estimate(const EstimateOptions& opt) {
  const auto start = Clock::now();
  const Dataset ds = read_dataset_file(opt.data);
  if (ds.records.empty()) throw ParseError("dataset is empty");
  if (opt.z.empty()) throw ConfigError("estimate: no query covariates given");

  double h = opt.h;
  std::string h_mode = "fixed";
  if (!(h > 0.0)) {
    BandwidthGrid grid;
    if (opt.bandwidth_grid.empty())
      grid = BandwidthGrid::default_for(static_cast<int>(ds.records.size()),
                                        ds.covariate_dim);
    else
      grid.candidates = opt.bandwidth_grid;
    h = select_bandwidth(ds, grid).h;
    h_mode = "cpe_tenfold";
  }

  const std::string fits_path = opt.out + ".fits.csv";
  const std::string cure_path = opt.out + ".cure.csv";
  const std::string curves_path = opt.out + ".curves.csv";
  auto fits = open_output(fits_path);
  auto cure = open_output(cure_path);
  auto curves = open_output(curves_path);
  fits << "z,lambda_hat,rate_degenerate,h,k,a_n\n";
  cure << "z,state,cure_rate\n";
  curves << "z,state,t,density,survival\n";

  const KernelConfig config{h, opt.rate_cap};
  for (double z : opt.z) {
    const FittedEstimator fit = fit_estimator(ds, z, config, opt.k);
    if (fit.rate_degenerate)
      std::cerr << "warning: degenerate rate fit at z=" << format_double(z)
                << " (no usable mass in bandwidth)\n";
    fits << format_double(z) << ',' << format_double(fit.lambda_hat) << ','
         << (fit.rate_degenerate ? 1 : 0) << ',' << format_double(fit.h) << ','
         << fit.k << ',' << labels_csv_field(fit.a_n) << '\n';
    for (int x = 0; x < fit.n_states; ++x)
      cure << format_double(z) << ',' << x + 1 << ','
           << format_double(estimate_cure_rate(fit, x)) << '\n';

    const double tmax =
        opt.tmax > 0.0 ? opt.tmax : erlang_tail_horizon(fit.k, fit.lambda_hat);
    for (int x = 0; x < fit.n_states; ++x) {
      const ErlangMixture mix = fit.coeffs.mixture(x, fit.lambda_hat);
      for (int i = 0; i < opt.tpoints; ++i) {
        const double t = tmax * i / (opt.tpoints - 1);
        curves << format_double(z) << ',' << x + 1 << ',' << format_double(t)
               << ',' << format_double(mix.density(t)) << ','
               << format_double(mix.survival(t)) << '\n';
      }
    }
  }

  json params{{"data", opt.data},       {"k", opt.k},
              {"h", h},                 {"h_mode", h_mode},
              {"rate_cap", opt.rate_cap}, {"tpoints", opt.tpoints}};
  params["z"] = opt.z;
  if (opt.tmax > 0.0) params["tmax"] = opt.tmax;
  write_manifest(opt.out + ".manifest.json", "estimate", params, {opt.data},
                 {fits_path, cure_path, curves_path}, seconds_since(start));
  return 0;
}

int cmd_oracle(const OracleOptions& opt) {
  const auto start = Clock::now();
  if (opt.coeffs_out.empty() && opt.density_out.empty())
    throw ConfigError("oracle: need --coeffs-out and/or --density-out");
  const ModelSpec spec = load_model(opt.model);
  const CoefficientTable table = true_coefficients(spec, opt.z, opt.k);
  const double lambda = spec.rate_at(opt.z);

  std::vector<std::string> outputs;
  if (!opt.coeffs_out.empty()) {
    auto os = open_output(opt.coeffs_out);
    os << "j,state,value\n";
    for (int j = 0; j <= table.k; ++j)
      for (int x = 0; x < table.n_states; ++x)
        os << j << ',' << x + 1 << ',' << format_double(table.at(j, x)) << '\n';
    outputs.push_back(opt.coeffs_out);
  }
  if (!opt.density_out.empty()) {
    auto os = open_output(opt.density_out);
    os << "t,state,value\n";
    const double tmax =
        opt.tmax > 0.0 ? opt.tmax : erlang_tail_horizon(opt.k, lambda);
    for (int x = 0; x < table.n_states; ++x) {
      const ErlangMixture mix = table.mixture(x, lambda);
      for (int i = 0; i < opt.tpoints; ++i) {
        const double t = tmax * i / (opt.tpoints - 1);
        os << format_double(t) << ',' << x + 1 << ','
           << format_double(mix.density(t)) << '\n';
      }
    }
    outputs.push_back(opt.density_out);
  }

  json params{{"model", opt.model}, {"z", opt.z}, {"k", opt.k},
              {"tpoints", opt.tpoints}};
  if (opt.tmax > 0.0) params["tmax"] = opt.tmax;
  const std::string manifest_base =
      !opt.coeffs_out.empty() ? opt.coeffs_out : opt.density_out;
  write_manifest(manifest_base + ".manifest.json", "oracle", params,
                 opt.model == "model-a" || opt.model == "model-b"
                     ? std::vector<std::string>{}
                     : std::vector<std::string>{opt.model},
                 outputs, seconds_since(start));
  return 0;
}

int cmd_bandwidth(const BandwidthOptions& opt) {
  const auto start = Clock::now();
  const Dataset ds = read_dataset_file(opt.data);
  BandwidthGrid grid;
  if (opt.grid.empty())
    grid = BandwidthGrid::default_for(static_cast<int>(ds.records.size()),
                                      ds.covariate_dim);
  else
    grid.candidates = opt.grid;
  const FoldScheme scheme = opt.proportional_folds ? FoldScheme::Proportional
                                                   : FoldScheme::FixedBlocks;
  const BandwidthSelection sel = select_bandwidth(ds, grid, scheme);

  const auto emit = [&](std::ostream& os) {
    os << "fold,h\n";
    for (std::size_t i = 0; i < sel.fold_h.size(); ++i)
      os << i + 1 << ',' << format_double(sel.fold_h[i]) << '\n';
    os << "mean," << format_double(sel.h) << '\n';
  };
  if (opt.out.empty()) {
    emit(std::cout);
  } else {
    auto os = open_output(opt.out);
    emit(os);
    json params{{"data", opt.data},
                {"fold_scheme", opt.proportional_folds ? "proportional" : "blocks"},
                {"grid", grid.candidates}};
    write_manifest(opt.out + ".manifest.json", "bandwidth", params, {opt.data},
                   {opt.out}, seconds_since(start));
  }
  return 0;
}

int cmd_bench(const BenchOptions& opt) {
  const auto start = Clock::now();
  ExperimentConfig config = load_experiment_config(opt.config);
  if (opt.has_seed_override) config.master_seed = opt.seed_override;

  std::filesystem::create_directories(opt.out_dir);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(opt.out_dir) / name).string();
  };

  const RiskReport report = run_experiment(config);
  {
    auto os = open_output(path("report.csv"));
    write_report_csv(os, report);
  }
  {
    auto os = open_output(path("boxplots.csv"));
    write_boxplots_csv(os, report);
  }

  long flagged = 0;
  for (const auto& row : report.rows)
    if (row.status != "ok") ++flagged;
  if (flagged > 0)
    std::cerr << "warning: " << flagged << " flagged replicate rows\n";

  json params{{"config", opt.config},
              {"model", config.model},
              {"sample_sizes", config.sample_sizes},
              {"replicates", config.replicates},
              {"z_grid", config.z_grid},
              {"k", config.k},
              {"master_seed", config.master_seed},
              {"quadrature_panels", config.quadrature_panels},
              {"rate_cap", config.rate_cap},
              {"bandwidth_per_z", config.bandwidth_per_z},
              {"whisker_convention", "tukey_1.5_iqr"},
              {"quartile_convention", "linear_interpolation_type7"}};
  write_manifest(path("report.csv.manifest.json"), "bench", params,
                 {opt.config}, {path("report.csv"), path("boxplots.csv")},
                 seconds_since(start));
  return 0;
}

}  // namespace fht
