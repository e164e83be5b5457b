#include "fht/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace fht {

namespace {

void require_truncation(int k) {
  if (k > kTruncationCeiling)
    throw TruncationError("truncation k=" + std::to_string(k) +
                          " exceeds ceiling " +
                          std::to_string(kTruncationCeiling));
}

}  // namespace

double CoefficientTable::hitting_mass(int x) const {
  double sum = 0.0;
  for (int j = 1; j <= k; ++j) sum += at(j, x);
  return sum;
}

ErlangMixture CoefficientTable::mixture(int x, double lambda) const {
  ErlangMixture mix;
  mix.lambda = lambda;
  mix.weights.resize(k);
  for (int j = 1; j <= k; ++j) mix.weights[j - 1] = at(j, x);
  return mix;
}

std::vector<std::string> CoefficientTable::check_invariants() const {
  std::vector<std::string> out;
  for (int x = 0; x < n_states; ++x) {
    double sum = 0.0;
    for (int j = 0; j <= k; ++j) {
      const double v = at(j, x);
      if (!(v >= 0.0) || !(v <= 1.0))
        out.push_back("c_" + std::to_string(j) + "(" + std::to_string(x + 1) +
                      ") outside [0,1]: " + std::to_string(v));
      sum += v;
    }
    if (sum > 1.0 + 1e-12)
      out.push_back("coefficient mass at state " + std::to_string(x + 1) +
                    " exceeds 1: " + std::to_string(sum));
    const bool is_term =
        std::binary_search(terminal.begin(), terminal.end(), x);
    if (at(0, x) != (is_term ? 1.0 : 0.0))
      out.push_back("c_0(" + std::to_string(x + 1) +
                    ") does not match the terminal indicator");
  }
  return out;
}

CoefficientTable true_coefficients(const ModelSpec& spec, double z, int k) {
  if (k < 0) throw std::invalid_argument("true_coefficients: k must be >= 0");
  require_truncation(k);
  const int n = spec.n_states;
  const std::vector<double> p = spec.transition_at(z);

  CoefficientTable table;
  table.k = k;
  table.n_states = n;
  table.z = {z};
  table.terminal = spec.terminal_set;
  table.values.assign((k + 1) * n, 0.0);

  for (int x = 0; x < n; ++x)
    table.at(0, x) = spec.is_terminal(x) ? 1.0 : 0.0;
  for (int j = 1; j <= k; ++j) {
    for (int x = 0; x < n; ++x) {
      if (spec.is_terminal(x)) continue;  // c_j vanishes on A for j >= 1
      double acc = 0.0;
      const double* row = &p[x * n];
      for (int y = 0; y < n; ++y) acc += row[y] * table.at(j - 1, y);
      table.at(j, x) = acc;
    }
  }
  return table;
}

double true_density(const ModelSpec& spec, double z, int x, double t, int k) {
  require_truncation(k);
  if (t < 0.0) throw std::invalid_argument("true_density: t must be >= 0");
  const CoefficientTable table = true_coefficients(spec, z, k);
  return table.mixture(x, spec.rate_at(z)).density(t);
}

double true_survival(const ModelSpec& spec, double z, int x, double t, int k) {
  require_truncation(k);
  if (t < 0.0) throw std::invalid_argument("true_survival: t must be >= 0");
  const CoefficientTable table = true_coefficients(spec, z, k);
  return table.mixture(x, spec.rate_at(z)).survival(t);
}

Partition reachable_partition(const ModelSpec& spec, double z) {
  const int n = spec.n_states;
  const std::vector<double> p = spec.transition_at(z);

  // breadth-first search on the reversed support graph, seeded at A;
  // an edge exists iff the transition entry is exactly positive
  std::vector<char> reaches(n, 0);
  std::deque<int> queue;
  for (int a : spec.terminal_set) {
    reaches[a] = 1;
    queue.push_back(a);
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

  Partition part;
  part.terminal = spec.terminal_set;
  for (int x = 0; x < n; ++x) {
    if (spec.is_terminal(x)) continue;
    (reaches[x] ? part.connected : part.isolated).push_back(x);
  }
  return part;
}

CureRate true_cure_rate(const ModelSpec& spec, double z, int x, int k) {
  require_truncation(k);
  if (spec.is_terminal(x)) return {0.0, false};
  const Partition part = reachable_partition(spec, z);
  if (std::binary_search(part.isolated.begin(), part.isolated.end(), x))
    return {1.0, false};
  const CoefficientTable table = true_coefficients(spec, z, k);
  CureRate cure;
  cure.value = 1.0 - table.hitting_mass(x);
  cure.truncation_flagged = table.at(k, x) > 1e-12;
  return cure;
}

DecayFit geometric_decay_check(const CoefficientTable& table) {
  if (table.k < 20)
    throw std::invalid_argument("geometric_decay_check: requires k >= 20");

  std::vector<std::pair<double, double>> pts;  // (j, log sup_x c_j)
  for (int j = (table.k + 1) / 2; j <= table.k; ++j) {
    double sup = 0.0;
    for (int x = 0; x < table.n_states; ++x) sup = std::max(sup, table.at(j, x));
    if (sup > 0.0) pts.emplace_back(static_cast<double>(j), std::log(sup));
  }
  if (pts.size() < 2) return {0.0, 0.0, true};  // fully decayed tail

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;

  DecayFit fit;
  fit.r_hat = std::exp(slope);
  fit.m_hat = std::exp(intercept);
  fit.pass = slope < 0.0;
  return fit;
}

std::vector<double> mc_hitting_step_frequencies(const ModelSpec& spec, double z,
                                                int start, int j_max, long n_mc,
                                                Rng& rng) {
  const int n = spec.n_states;
  const std::vector<double> p = spec.transition_at(z);
  std::vector<long> counts(j_max + 1, 0);
  for (long i = 0; i < n_mc; ++i) {
    int state = start;
    if (spec.is_terminal(state)) {
      ++counts[0];
      continue;
    }
    for (int j = 1; j <= j_max; ++j) {
      state = rng.categorical(&p[state * n], n);
      if (spec.is_terminal(state)) {
        ++counts[j];
        break;
      }
    }
  }
  std::vector<double> freq(j_max + 1);
  for (int j = 0; j <= j_max; ++j)
    freq[j] = static_cast<double>(counts[j]) / static_cast<double>(n_mc);
  return freq;
}

double mc_cure_rate(const ModelSpec& spec, double z, int start, long n_mc,
                    int step_cap, Rng& rng) {
  const int n = spec.n_states;
  const std::vector<double> p = spec.transition_at(z);

  // walks that enter an isolated state can never hit A; stop them early
  // instead of spinning out the full step cap
  const Partition part = reachable_partition(spec, z);
  std::vector<char> isolated(n, 0);
  for (int x : part.isolated) isolated[x] = 1;

  long never = 0;
  for (long i = 0; i < n_mc; ++i) {
    int state = start;
    bool hit = spec.is_terminal(state);
    for (int j = 0; j < step_cap && !hit; ++j) {
      if (isolated[state]) break;
      state = rng.categorical(&p[state * n], n);
      hit = spec.is_terminal(state);
    }
    if (!hit) ++never;
  }
  return static_cast<double>(never) / static_cast<double>(n_mc);
}

double erlang_tail_horizon(int k, double lambda) {
  return (k + 10.0 * std::sqrt(static_cast<double>(k))) / lambda;
}

}  // namespace fht
