#include "fht/risk.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "fht/io.hpp"
#include "fht/quadrature.hpp"

namespace fht {

namespace {

constexpr int kConfigFormatVersion = 1;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
std::vector<T> parse_list(const std::string& value) {
  std::string cleaned = value;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream is(cleaned);
  std::vector<T> out;
  T v;
  while (is >> v) out.push_back(v);
  return out;
}

bool parse_bool(const std::string& value, const std::string& where) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(where + ": expected true/false, got '" + value + "'");
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");

  ExperimentConfig cfg;
  bool saw_version = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "version") {
      if (std::stol(value) != kConfigFormatVersion)
        throw ConfigError(where + ": unsupported config version " + value);
      saw_version = true;
    } else if (key == "model") {
      cfg.model = value;
    } else if (key == "sample_sizes") {
      cfg.sample_sizes = parse_list<int>(value);
    } else if (key == "replicates") {
      cfg.replicates = std::stoi(value);
    } else if (key == "z_grid") {
      cfg.z_grid = parse_list<double>(value);
    } else if (key == "k") {
      cfg.k = std::stoi(value);
    } else if (key == "master_seed") {
      cfg.master_seed = std::stoull(value);
    } else if (key == "quadrature_panels") {
      cfg.quadrature_panels = std::stoi(value);
    } else if (key == "rate_cap") {
      cfg.rate_cap = std::stod(value);
    } else if (key == "bandwidth_per_z") {
      cfg.bandwidth_per_z = parse_bool(value, where);
    } else if (key == "fold_scheme") {
      if (value == "blocks")
        cfg.fold_scheme = FoldScheme::FixedBlocks;
      else if (value == "proportional")
        cfg.fold_scheme = FoldScheme::Proportional;
      else
        throw ConfigError(where + ": unknown fold_scheme '" + value + "'");
    } else if (key == "bandwidth_grid") {
      cfg.bandwidth_grid = parse_list<double>(value);
    } else {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
  if (!saw_version) throw ConfigError(path + ": missing 'version' line");
  if (cfg.replicates < 1) throw ConfigError(path + ": replicates must be >= 1");
  if (cfg.k > kTruncationCeiling)
    throw ConfigError(path + ": k exceeds truncation ceiling");
  return cfg;
}

namespace {

// per-state weight rows laid out contiguously for the integrand loop
struct MixturePack {
  int k = 0;
  int n_states = 0;
  double lambda = 1.0;
  std::vector<double> w;  // n_states rows of k weights

  explicit MixturePack(const CoefficientTable& table, double lam)
      : k(table.k), n_states(table.n_states), lambda(lam) {
    w.resize(static_cast<std::size_t>(n_states) * k);
    for (int x = 0; x < n_states; ++x)
      for (int j = 1; j <= k; ++j)
        w[static_cast<std::size_t>(x) * k + j - 1] = table.at(j, x);
  }
};

// sup over states of (est density - true density)^2 at one time point
double sup_sq_gap(const MixturePack& est, const MixturePack& tru, double t,
                  std::vector<double>& ge, std::vector<double>& gt) {
  double g = est.lambda * std::exp(-est.lambda * t);
  double lt = est.lambda * t;
  for (int j = 0; j < est.k; ++j) {
    ge[j] = g;
    g *= lt / (j + 1);
  }
  g = tru.lambda * std::exp(-tru.lambda * t);
  lt = tru.lambda * t;
  for (int j = 0; j < tru.k; ++j) {
    gt[j] = g;
    g *= lt / (j + 1);
  }
  double sup = 0.0;
  for (int x = 0; x < tru.n_states; ++x) {
    double fe = 0.0, ft = 0.0;
    const double* we = &est.w[static_cast<std::size_t>(x) * est.k];
    const double* wt = &tru.w[static_cast<std::size_t>(x) * tru.k];
    for (int j = 0; j < est.k; ++j) fe += we[j] * ge[j];
    for (int j = 0; j < tru.k; ++j) ft += wt[j] * gt[j];
    const double d = fe - ft;
    sup = std::max(sup, d * d);
  }
  return sup;
}

}  // namespace

double integrated_risk(const FittedEstimator& fit, const ModelSpec& spec,
                       double z, int k, int panels) {
  const double lambda_z = spec.rate_at(z);
  const CoefficientTable truth = true_coefficients(spec, z, k);
  if (fit.n_states != spec.n_states)
    throw std::invalid_argument("integrated_risk: state count mismatch");

  const MixturePack est(fit.coeffs, fit.lambda_hat);
  const MixturePack tru(truth, lambda_z);
  const double tmax =
      erlang_tail_horizon(std::max(k, fit.k), std::min(fit.lambda_hat, lambda_z));

  std::vector<double> ge(est.k), gt(tru.k);
  return simpson([&](double t) { return sup_sq_gap(est, tru, t, ge, gt); }, 0.0,
                 tmax, panels);
}

double coefficient_sup_error(const FittedEstimator& fit, const ModelSpec& spec,
                             double z, int k) {
  const CoefficientTable truth = true_coefficients(spec, z, k);
  double sup = 0.0;
  for (int x = 0; x < spec.n_states; ++x) {
    for (int j = 1; j <= k; ++j) {
      const double est = j <= fit.coeffs.k ? fit.coeffs.at(j, x) : 0.0;
      const double d = est - truth.at(j, x);
      sup = std::max(sup, d * d);
    }
  }
  return sup;
}

double lambda_ratio(const FittedEstimator& fit, const ModelSpec& spec,
                    double z) {
  const double lambda_z = spec.rate_at(z);
  if (!(lambda_z > 0.0))
    throw std::invalid_argument("lambda_ratio: rate must be positive");
  return fit.lambda_hat / lambda_z;
}

int thread_count_from_env() {
  if (const char* env = std::getenv("FHT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

RiskReport run_experiment(const ExperimentConfig& config) {
  const ModelSpec spec = load_model(config.model);
  const int n_sizes = static_cast<int>(config.sample_sizes.size());
  const int n_z = static_cast<int>(config.z_grid.size());
  const int reps = config.replicates;

  RiskReport report;
  report.config = config;
  report.rows.resize(static_cast<std::size_t>(n_sizes) * n_z * reps);

  // slot of (size_index, z_index, replicate_index) in (n, z, replicate) order
  const auto slot = [&](int si, int zi, int ri) {
    return (static_cast<std::size_t>(si) * n_z + zi) * reps + ri;
  };

  const auto run_replicate = [&](int si, int ri) {
    const int n = config.sample_sizes[si];
    const std::uint64_t seed =
        derive_seed(config.master_seed, static_cast<std::uint64_t>(n),
                    static_cast<std::uint64_t>(ri + 1));
    Rng rng(seed);

    std::string status = "ok";
    Dataset ds;
    try {
      ds = simulate_dataset(spec, n, rng);
      ds.seed = seed;
    } catch (const std::exception&) {
      status = "simulation_failed";
    }

    BandwidthGrid grid;
    if (config.bandwidth_grid.empty())
      grid = BandwidthGrid::default_for(n, spec.covariate_dim);
    else
      grid.candidates = config.bandwidth_grid;

    double h_shared = std::numeric_limits<double>::quiet_NaN();
    if (status == "ok" && !config.bandwidth_per_z) {
      try {
        h_shared = select_bandwidth(ds, grid, config.fold_scheme).h;
      } catch (const InsufficientDataError&) {
        status = "insufficient_data";
      }
    }

    for (int zi = 0; zi < n_z; ++zi) {
      const double z = config.z_grid[zi];
      RiskRow row;
      row.model = spec.name;
      row.n = n;
      row.z = z;
      row.replicate = ri + 1;
      row.status = status;
      row.i_risk = row.coeff_sup_err = row.lambda_ratio = row.h_selected =
          std::numeric_limits<double>::quiet_NaN();

      if (status == "ok") {
        try {
          double h = h_shared;
          if (config.bandwidth_per_z)
            h = select_bandwidth_at(ds, grid, {z}, config.fold_scheme).h;
          const KernelConfig kc{h, config.rate_cap};
          const FittedEstimator fit = fit_estimator(ds, z, kc, config.k);
          row.i_risk =
              integrated_risk(fit, spec, z, config.k, config.quadrature_panels);
          row.coeff_sup_err = coefficient_sup_error(fit, spec, z, config.k);
          row.lambda_ratio = lambda_ratio(fit, spec, z);
          row.h_selected = h;
          row.a_n_correct = fit.a_n == spec.terminal_set;
        } catch (const InsufficientDataError&) {
          row.status = "insufficient_data";
        }
      }
      report.rows[slot(si, zi, ri)] = std::move(row);
    }
  };

  const int total_tasks = n_sizes * reps;
  const int threads = std::min(thread_count_from_env(), total_tasks);
  if (threads <= 1) {
    for (int task = 0; task < total_tasks; ++task)
      run_replicate(task / reps, task % reps);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        while (true) {
          const int task = next.fetch_add(1);
          if (task >= total_tasks) return;
          run_replicate(task / reps, task % reps);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return report;
}

void write_report_csv(std::ostream& os, const RiskReport& report) {
  os << "model,n,z,replicate,i_risk,coeff_sup_err,lambda_ratio,h_selected,"
        "a_n_correct,status\n";
  for (const auto& row : report.rows) {
    os << row.model << ',' << row.n << ',' << format_double(row.z) << ','
       << row.replicate << ',' << format_double(row.i_risk) << ','
       << format_double(row.coeff_sup_err) << ','
       << format_double(row.lambda_ratio) << ','
       << format_double(row.h_selected) << ',' << (row.a_n_correct ? 1 : 0)
       << ',' << row.status << '\n';
  }
}

BoxStats tukey_box_stats(std::vector<double> values) {
  if (values.empty())
    throw std::invalid_argument("tukey_box_stats: empty sample");
  std::sort(values.begin(), values.end());
  const auto quantile = [&](double p) {
    const double idx = p * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = idx - lo;
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  BoxStats s;
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.lo_whisker = s.q3;
  s.hi_whisker = s.q1;
  for (double v : values) {
    if (v >= lo_fence) {
      s.lo_whisker = v;  // first (smallest) value inside the fence
      break;
    }
  }
  for (auto it = values.rbegin(); it != values.rend(); ++it) {
    if (*it <= hi_fence) {
      s.hi_whisker = *it;  // largest value inside the fence
      break;
    }
  }
  return s;
}

void write_boxplots_csv(std::ostream& os, const RiskReport& report) {
  os << "metric,n,z,q1,median,q3,lo_whisker,hi_whisker\n";
  const char* metrics[] = {"i_risk", "coeff_sup_err", "lambda_ratio"};
  for (const char* metric : metrics) {
    for (int n : report.config.sample_sizes) {
      for (double z : report.config.z_grid) {
        std::vector<double> values;
        for (const auto& row : report.rows) {
          if (row.n != n || row.z != z || row.status != "ok") continue;
          if (std::string(metric) == "i_risk") values.push_back(row.i_risk);
          else if (std::string(metric) == "coeff_sup_err")
            values.push_back(row.coeff_sup_err);
          else
            values.push_back(row.lambda_ratio);
        }
        if (values.empty()) continue;
        const BoxStats s = tukey_box_stats(std::move(values));
        os << metric << ',' << n << ',' << format_double(z) << ','
           << format_double(s.q1) << ',' << format_double(s.median) << ','
           << format_double(s.q3) << ',' << format_double(s.lo_whisker) << ','
           << format_double(s.hi_whisker) << '\n';
      }
    }
  }
}

}  // namespace fht
