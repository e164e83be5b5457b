#ifndef FHT_ESTIMATOR_HPP
#define FHT_ESTIMATOR_HPP

#include <vector>

#include "fht/model.hpp"
#include "fht/oracle.hpp"

namespace fht {

struct KernelConfig {
  double bandwidth = 0.1;
  double rate_cap = 5.0;  // hard upper bound on the rate estimate
};

// Flattened Epanechnikov-style kernel (1/2)(4/3 - u^2) on |u| <= 1: integral
// one, and bounded away from zero on its whole support.
double kernel_value(double u);
// Norm-based version c_p (4/3 - |u|^2)_+ with c_p normalizing over the unit
// ball; coincides with the scalar kernel at p = 1.
double kernel_value(const std::vector<double>& u);

struct WeightVector {
  std::vector<double> w;  // normalized; all zero when no mass in bandwidth
  bool empty = false;
};

// omega_i = K_h(z - Z_i) / sum_j K_h(z - Z_j). The 1/h^p scale cancels in
// the ratio and is not applied, keeping ties across bandwidths exact.
WeightVector kernel_weights(const Dataset& ds, const std::vector<double>& z,
                            const KernelConfig& config);

struct RateEstimate {
  double value = 0.0;
  // no usable record carries kernel mass near z; value is pinned to the cap
  bool degenerate = false;
};

// Inverse of the kernel-weighted mean holding time E_M/M, capped at
// rate_cap. Records with m = 0 carry no holding-time information and are
// excluded before weighting.
RateEstimate estimate_rate(const Dataset& ds, const std::vector<double>& z,
                           const KernelConfig& config);

// Final states of the uncensored records: the discovered terminal set A_n.
std::vector<int> observed_terminal_set(const Dataset& ds);

// Kernel-weighted transition counts; a row with zero weighted visits is left
// identically zero.
std::vector<double> estimate_transition_matrix(const Dataset& ds,
                                               const std::vector<double>& z,
                                               const KernelConfig& config,
                                               int n_states);

// Coefficient recursion seeded with the discovered terminal set.
CoefficientTable estimate_coefficients(const std::vector<double>& p_hat,
                                       int n_states,
                                       const std::vector<int>& a_n, int k);

struct FittedEstimator {
  std::vector<double> z;
  double lambda_hat = 0.0;
  bool rate_degenerate = false;
  std::vector<double> p_hat;  // n x n row-major
  std::vector<int> a_n;       // sorted
  CoefficientTable coeffs;
  double h = 0.0;
  int k = 0;
  int n_states = 0;
};

FittedEstimator fit_estimator(const Dataset& ds, const std::vector<double>& z,
                              const KernelConfig& config, int k);
FittedEstimator fit_estimator(const Dataset& ds, double z,
                              const KernelConfig& config, int k);

double estimate_density(const FittedEstimator& fit, int x, double t);
double estimate_survival(const FittedEstimator& fit, int x, double t);
// 1 - sum_j c_{n,j}(x) clipped to [0,1]; exactly 0 on the discovered set.
double estimate_cure_rate(const FittedEstimator& fit, int x);

// States with a support-graph path into `targets` (targets included).
// Coefficients must vanish outside this set whenever the transition
// estimator only places mass on observed transitions.
std::vector<int> support_connected_to(const std::vector<double>& p, int n,
                                      const std::vector<int>& targets);

}  // namespace fht

#endif
