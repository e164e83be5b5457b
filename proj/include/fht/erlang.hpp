#ifndef FHT_ERLANG_HPP
#define FHT_ERLANG_HPP

#include <cmath>
#include <vector>

namespace fht {

// Mixture sum_{j=1}^{k} w_j * Erlang(j, lambda). The j-th density term
// lambda e^{-lambda t} (lambda t)^{j-1}/(j-1)! is built by the recurrence
// g_{j+1} = g_j * lambda t / j, so no factorial or power ever overflows.
struct ErlangMixture {
  double lambda = 1.0;
  std::vector<double> weights;  // weights[j-1] multiplies Erlang(j, lambda)

  double density(double t) const {
    double g = lambda * std::exp(-lambda * t);
    const double lt = lambda * t;
    double sum = 0.0;
    for (std::size_t j = 1; j <= weights.size(); ++j) {
      sum += weights[j - 1] * g;
      g *= lt / static_cast<double>(j);
    }
    return sum;
  }

  // P(T <= t) restricted to the mixture mass (excludes any defect at +inf).
  // Uses P(Erlang(j) > t) = sum_{i<j} e^{-lt}(lt)^i/i!.
  double cdf(double t) const {
    const double lt = lambda * t;
    double pois = std::exp(-lt);  // Poisson(lt) pmf at i, starting at i=0
    double tail = 0.0;            // sum_{i<j} pmf_i, updated as j grows
    double sum = 0.0;
    for (std::size_t j = 1; j <= weights.size(); ++j) {
      tail += pois;
      sum += weights[j - 1] * (1.0 - tail);
      pois *= lt / static_cast<double>(j);
    }
    return sum;
  }

  // 1 - cdf(t): includes the mixture defect (mass never reaching the event).
  double survival(double t) const { return 1.0 - cdf(t); }
};

}  // namespace fht

#endif
