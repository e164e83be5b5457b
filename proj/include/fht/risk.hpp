#ifndef FHT_RISK_HPP
#define FHT_RISK_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fht/bandwidth.hpp"
#include "fht/estimator.hpp"
#include "fht/model.hpp"
#include "fht/oracle.hpp"

namespace fht {

struct ExperimentConfig {
  std::string model = "model-a";
  std::vector<int> sample_sizes{100, 200, 400, 800};
  int replicates = 50;
  std::vector<double> z_grid{0.2, 0.4, 0.6, 0.8};
  int k = 130;
  std::uint64_t master_seed = 1;
  int quadrature_panels = 1 << 14;
  double rate_cap = 5.0;
  bool bandwidth_per_z = false;  // default: one bandwidth per dataset
  FoldScheme fold_scheme = FoldScheme::FixedBlocks;
  std::vector<double> bandwidth_grid;  // empty: default grid per sample size
};

ExperimentConfig load_experiment_config(const std::string& path);

struct RiskRow {
  std::string model;
  int n = 0;
  double z = 0.0;
  int replicate = 0;  // 1-based
  double i_risk = 0.0;
  double coeff_sup_err = 0.0;
  double lambda_ratio = 0.0;
  double h_selected = 0.0;
  bool a_n_correct = false;
  std::string status = "ok";  // or an error tag; metrics are nan then
};

struct RiskReport {
  ExperimentConfig config;
  std::vector<RiskRow> rows;  // ordered by (n, z, replicate)
};

// Integral over [0, T_max] of the squared sup-over-states gap between the
// fitted and the exact truncated density, by composite Simpson with
// T_max = (k + 10 sqrt(k)) / min(lambda_hat, lambda_z).
double integrated_risk(const FittedEstimator& fit, const ModelSpec& spec,
                       double z, int k, int panels = 1 << 14);

// max over states and j = 1..k of (c_hat_j - c_j)^2
double coefficient_sup_error(const FittedEstimator& fit, const ModelSpec& spec,
                             double z, int k);

double lambda_ratio(const FittedEstimator& fit, const ModelSpec& spec, double z);

// Full replication sweep. Deterministic given config.master_seed: every
// replicate draws its stream from hash(master_seed, n, replicate), so the
// result does not depend on scheduling. Parallelism is controlled by the
// FHT_THREADS environment variable.
RiskReport run_experiment(const ExperimentConfig& config);

void write_report_csv(std::ostream& os, const RiskReport& report);

struct BoxStats {
  double q1 = 0.0, median = 0.0, q3 = 0.0;
  double lo_whisker = 0.0, hi_whisker = 0.0;  // Tukey 1.5 IQR convention
};

BoxStats tukey_box_stats(std::vector<double> values);

void write_boxplots_csv(std::ostream& os, const RiskReport& report);

int thread_count_from_env();

}  // namespace fht

#endif
