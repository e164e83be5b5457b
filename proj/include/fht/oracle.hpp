#ifndef FHT_ORACLE_HPP
#define FHT_ORACLE_HPP

#include <string>
#include <vector>

#include "fht/erlang.hpp"
#include "fht/model.hpp"

namespace fht {

// Partial sums past this order sit below double precision; higher truncations
// are rejected rather than silently degraded.
inline constexpr int kTruncationCeiling = 130;

struct TruncationError : std::runtime_error {
  explicit TruncationError(const std::string& msg) : std::runtime_error(msg) {}
};

// c_j(x,z) for j = 0..k over all states, plus the terminal set the
// recursion was seeded with (the true A or a discovered A_n).
struct CoefficientTable {
  int k = 0;
  int n_states = 0;
  std::vector<double> z;
  std::vector<int> terminal;   // sorted 0-based
  std::vector<double> values;  // (k+1) x n_states, row-major in j

  double at(int j, int x) const { return values[j * n_states + x]; }
  double& at(int j, int x) { return values[j * n_states + x]; }

  // sum_{j=1..k} c_j(x): the within-truncation hitting mass from x
  double hitting_mass(int x) const;

  // weights for the Erlang mixture of the state-x sub-density
  ErlangMixture mixture(int x, double lambda) const;

  // empty when every table invariant holds
  std::vector<std::string> check_invariants() const;
};

CoefficientTable true_coefficients(const ModelSpec& spec, double z, int k);

double true_density(const ModelSpec& spec, double z, int x, double t, int k);
double true_survival(const ModelSpec& spec, double z, int x, double t, int k);

// A / B_z / C_z split of the state space by support-graph reachability.
struct Partition {
  std::vector<int> terminal;
  std::vector<int> connected;
  std::vector<int> isolated;
};

Partition reachable_partition(const ModelSpec& spec, double z);

struct CureRate {
  double value = 0.0;
  // set when the last coefficient c_k still carries visible mass, i.e. the
  // truncated tail is not numerically negligible
  bool truncation_flagged = false;
};

CureRate true_cure_rate(const ModelSpec& spec, double z, int x, int k);

// Least-squares fit of log sup_x c_j against j on the tail j >= k/2.
struct DecayFit {
  double m_hat = 0.0;
  double r_hat = 0.0;
  bool pass = false;
};

DecayFit geometric_decay_check(const CoefficientTable& table);

// Brute-force cross-checks: plain jump-chain walks with no censoring.
// freq[j] estimates P(S = j | Y_0 = start) for j = 0..j_max.
std::vector<double> mc_hitting_step_frequencies(const ModelSpec& spec, double z,
                                                int start, int j_max, long n_mc,
                                                Rng& rng);
// Fraction of walks that never reach the terminal set within step_cap jumps.
double mc_cure_rate(const ModelSpec& spec, double z, int start, long n_mc,
                    int step_cap, Rng& rng);

// Integration horizon (k + 10*sqrt(k))/lambda: Erlang(k, lambda) mass beyond
// it is below 1e-12.
double erlang_tail_horizon(int k, double lambda);

}  // namespace fht

#endif
