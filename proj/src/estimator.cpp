#include "fht/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>

namespace fht {

namespace {

void require_bandwidth(const KernelConfig& config) {
  if (!(config.bandwidth > 0.0))
    throw std::invalid_argument("kernel bandwidth must be > 0");
  if (!(config.rate_cap > 0.0))
    throw std::invalid_argument("rate cap must be > 0");
}

double squared_norm(const std::vector<double>& u) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return s;
}

// volume of the p-dimensional Euclidean unit ball
double unit_ball_volume(int p) {
  return std::pow(3.14159265358979323846, p / 2.0) / std::tgamma(p / 2.0 + 1.0);
}

// kernel at squared distance d2 = |z - Z_i|^2 / h^2, without the 1/h^p scale
double kappa(double d2, int p) {
  if (d2 > 1.0) return 0.0;
  if (p == 1) return 0.5 * (4.0 / 3.0 - d2);
  const double c = 1.0 / (unit_ball_volume(p) * (4.0 / 3.0 - p / (p + 2.0)));
  return c * (4.0 / 3.0 - d2);
}

double scaled_sq_distance(const std::vector<double>& z,
                          const std::vector<double>& zi, double h) {
  double d2 = 0.0;
  for (std::size_t c = 0; c < z.size(); ++c) {
    const double d = (z[c] - zi[c]) / h;
    d2 += d * d;
  }
  return d2;
}

}  // namespace

double kernel_value(double u) {
  const double u2 = u * u;
  return u2 <= 1.0 ? 0.5 * (4.0 / 3.0 - u2) : 0.0;
}

double kernel_value(const std::vector<double>& u) {
  const double d2 = squared_norm(u);
  return kappa(d2, static_cast<int>(u.size()));
}

WeightVector kernel_weights(const Dataset& ds, const std::vector<double>& z,
                            const KernelConfig& config) {
  require_bandwidth(config);
  const int p = static_cast<int>(z.size());
  WeightVector out;
  out.w.assign(ds.records.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& rec = ds.records[i];
    if (static_cast<int>(rec.z.size()) != p)
      throw std::invalid_argument("kernel_weights: covariate dimension mismatch");
    const double kv = kappa(scaled_sq_distance(z, rec.z, config.bandwidth), p);
    out.w[i] = kv;
    total += kv;
  }
  if (total <= 0.0) {
    std::fill(out.w.begin(), out.w.end(), 0.0);
    out.empty = true;
    return out;
  }
  for (double& w : out.w) w /= total;
  return out;
}

RateEstimate estimate_rate(const Dataset& ds, const std::vector<double>& z,
                           const KernelConfig& config) {
  require_bandwidth(config);
  const int p = static_cast<int>(z.size());
  double num = 0.0, den = 0.0;
  for (const auto& rec : ds.records) {
    if (rec.m < 1) continue;
    const double kv = kappa(scaled_sq_distance(z, rec.z, config.bandwidth), p);
    if (kv <= 0.0) continue;
    num += kv * (rec.hit_time / rec.m);
    den += kv;
  }
  if (den <= 0.0) return {config.rate_cap, true};
  const double mean_holding = num / den;
  return {std::min(1.0 / mean_holding, config.rate_cap), false};
}

std::vector<int> observed_terminal_set(const Dataset& ds) {
  std::set<int> found;
  for (const auto& rec : ds.records)
    if (rec.delta) found.insert(rec.states.back());
  return {found.begin(), found.end()};
}

std::vector<double> estimate_transition_matrix(const Dataset& ds,
                                               const std::vector<double>& z,
                                               const KernelConfig& config,
                                               int n_states) {
  require_bandwidth(config);
  const int p = static_cast<int>(z.size());
  const int n = n_states;
  std::vector<double> num(n * n, 0.0);  // weighted counts of x -> x'
  std::vector<double> den(n, 0.0);      // weighted visits of x
  for (const auto& rec : ds.records) {
    const double kv = kappa(scaled_sq_distance(z, rec.z, config.bandwidth), p);
    if (kv <= 0.0) continue;
    for (int i = 1; i <= rec.m; ++i) {
      const int from = rec.states[i - 1];
      const int to = rec.states[i];
      num[from * n + to] += kv;
      den[from] += kv;
    }
  }
  std::vector<double> p_hat(n * n, 0.0);
  for (int x = 0; x < n; ++x) {
    if (den[x] <= 0.0) continue;  // null row by convention
    for (int y = 0; y < n; ++y) p_hat[x * n + y] = num[x * n + y] / den[x];
  }
  return p_hat;
}

CoefficientTable estimate_coefficients(const std::vector<double>& p_hat,
                                       int n_states,
                                       const std::vector<int>& a_n, int k) {
  if (k < 1) throw std::invalid_argument("estimate_coefficients: k must be >= 1");
  if (k > kTruncationCeiling)
    throw TruncationError("truncation k=" + std::to_string(k) +
                          " exceeds ceiling " +
                          std::to_string(kTruncationCeiling));
  const int n = n_states;
  std::vector<char> in_an(n, 0);
  for (int s : a_n) in_an[s] = 1;

  CoefficientTable table;
  table.k = k;
  table.n_states = n;
  table.terminal = a_n;
  std::sort(table.terminal.begin(), table.terminal.end());
  table.values.assign((k + 1) * n, 0.0);

  for (int x = 0; x < n; ++x) table.at(0, x) = in_an[x] ? 1.0 : 0.0;
  for (int j = 1; j <= k; ++j) {
    for (int x = 0; x < n; ++x) {
      if (in_an[x]) continue;
      double acc = 0.0;
      const double* row = &p_hat[x * n];
      for (int y = 0; y < n; ++y) acc += row[y] * table.at(j - 1, y);
      table.at(j, x) = acc;
    }
  }
  return table;
}

FittedEstimator fit_estimator(const Dataset& ds, const std::vector<double>& z,
                              const KernelConfig& config, int k) {
  FittedEstimator fit;
  fit.z = z;
  fit.n_states = ds.state_count();
  fit.h = config.bandwidth;
  fit.k = k;
  const RateEstimate rate = estimate_rate(ds, z, config);
  fit.lambda_hat = rate.value;
  fit.rate_degenerate = rate.degenerate;
  fit.a_n = observed_terminal_set(ds);
  fit.p_hat = estimate_transition_matrix(ds, z, config, fit.n_states);
  fit.coeffs = estimate_coefficients(fit.p_hat, fit.n_states, fit.a_n, k);
  fit.coeffs.z = z;
  return fit;
}

FittedEstimator fit_estimator(const Dataset& ds, double z,
                              const KernelConfig& config, int k) {
  return fit_estimator(ds, std::vector<double>{z}, config, k);
}

double estimate_density(const FittedEstimator& fit, int x, double t) {
  if (t < 0.0) throw std::invalid_argument("estimate_density: t must be >= 0");
  return fit.coeffs.mixture(x, fit.lambda_hat).density(t);
}

double estimate_survival(const FittedEstimator& fit, int x, double t) {
  if (t < 0.0) throw std::invalid_argument("estimate_survival: t must be >= 0");
  return fit.coeffs.mixture(x, fit.lambda_hat).survival(t);
}

double estimate_cure_rate(const FittedEstimator& fit, int x) {
  if (std::binary_search(fit.a_n.begin(), fit.a_n.end(), x)) return 0.0;
  const double raw = 1.0 - fit.coeffs.hitting_mass(x);
  return std::clamp(raw, 0.0, 1.0);
}

std::vector<int> support_connected_to(const std::vector<double>& p, int n,
                                      const std::vector<int>& targets) {
  std::vector<char> reaches(n, 0);
  std::deque<int> queue;
  for (int t : targets) {
    if (t >= 0 && t < n && !reaches[t]) {
      reaches[t] = 1;
      queue.push_back(t);
    }
  }
  while (!queue.empty()) {
    const int y = queue.front();
    queue.pop_front();
    for (int x = 0; x < n; ++x) {
      if (!reaches[x] && p[x * n + y] > 0.0) {
        reaches[x] = 1;
        queue.push_back(x);
      }
    }
  }
  std::vector<int> out;
  for (int x = 0; x < n; ++x)
    if (reaches[x]) out.push_back(x);
  return out;
}

}  // namespace fht
