#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fht/io.hpp"
#include "fht/risk.hpp"

using namespace fht;

namespace {

// exact plug-in fit: true transition matrix, true terminal set, true rate
FittedEstimator plug_in_fit(const ModelSpec& spec, double z, int k) {
  FittedEstimator fit;
  fit.z = {z};
  fit.lambda_hat = spec.rate_at(z);
  fit.p_hat = spec.transition_at(z);
  fit.a_n = spec.terminal_set;
  fit.n_states = spec.n_states;
  fit.k = k;
  fit.h = 0.1;
  fit.coeffs = estimate_coefficients(fit.p_hat, fit.n_states, fit.a_n, k);
  return fit;
}

ModelSpec two_state_rate2() {
  ModelSpec spec;
  spec.name = "two-state";
  spec.n_states = 2;
  spec.terminal_set = {1};
  spec.covariate = CovariateLaw{};
  spec.limit = LimitLaw{5, 1.0};
  spec.rate_fn = Expr::parse("2");
  for (const char* cell : {"0", "1", "0", "1"})
    spec.transition_fn.push_back(Expr::parse(cell));
  return spec;
}

}  // namespace

TEST_CASE("integrated risk of the exact plug-in fit is zero") {
  const ModelSpec a = builtin_model_a();
  const FittedEstimator fit = plug_in_fit(a, 0.5, 130);
  CHECK(integrated_risk(fit, a, 0.5, 130) <= 1e-12);
  CHECK(coefficient_sup_error(fit, a, 0.5, 130) == 0.0);
  CHECK(lambda_ratio(fit, a, 0.5) == 1.0);
}

TEST_CASE("integrated risk of a halved single-Erlang weight is 1/4") {
  // estimated density 0.5 * 2 e^{-2t} vs true 2 e^{-2t}:
  // integral of (e^{-2t})^2 over [0, inf) is 1/4
  const ModelSpec spec = two_state_rate2();
  FittedEstimator fit = plug_in_fit(spec, 0.5, 130);
  fit.coeffs.at(1, 0) = 0.5;
  CHECK(integrated_risk(fit, spec, 0.5, 130) ==
        doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("coefficient sup error of an all-zero fit is at least 0.04") {
  const ModelSpec a = builtin_model_a();
  for (double z : {0.2, 0.5, 0.8}) {
    FittedEstimator fit = plug_in_fit(a, z, 130);
    fit.a_n = {};
    fit.coeffs = estimate_coefficients(fit.p_hat, fit.n_states, {}, 130);
    CHECK(coefficient_sup_error(fit, a, z, 130) >= 0.04);
  }
}

TEST_CASE("lambda ratio reports the cap distortion") {
  ModelSpec spec = two_state_rate2();
  spec.rate_fn = Expr::parse("1");
  FittedEstimator fit = plug_in_fit(spec, 0.5, 20);
  fit.lambda_hat = 5.0;  // cap-bound estimate against lambda_z = 1
  CHECK(lambda_ratio(fit, spec, 0.5) == 5.0);
}

TEST_CASE("doubling the panel count leaves the risk unchanged to 1e-8") {
  const ModelSpec a = builtin_model_a();
  Rng rng(derive_seed(5, 200, 1));
  const Dataset ds = simulate_dataset(a, 200, rng);
  const FittedEstimator fit = fit_estimator(ds, 0.5, {0.15, 5.0}, 130);
  const double coarse = integrated_risk(fit, a, 0.5, 130, 1 << 14);
  const double fine = integrated_risk(fit, a, 0.5, 130, 1 << 15);
  CHECK(std::abs(coarse - fine) <= 1e-8 * std::max(1.0, std::abs(fine)));
}

TEST_CASE("truncated plug-in risk obeys the fitted tail bound") {
  const ModelSpec a = builtin_model_a();
  for (double z : {0.2, 0.5, 0.8}) {
    const int k_fit = 20;
    FittedEstimator fit = plug_in_fit(a, z, k_fit);
    const double risk = integrated_risk(fit, a, z, 130);

    const DecayFit decay = geometric_decay_check(true_coefficients(a, z, 130));
    REQUIRE(decay.pass);
    if (decay.r_hat <= 0.0 || decay.r_hat >= 1.0) continue;  // degenerate fit
    const double lambda = a.rate_at(z);
    const double bound = lambda * decay.m_hat * decay.m_hat *
                         std::pow(decay.r_hat, 2 * k_fit + 1) /
                         (2.0 * (1.0 - decay.r_hat));
    CHECK(risk <= bound);
  }
}

TEST_CASE("a minimal experiment emits exactly one row") {
  ExperimentConfig config;
  config.model = "model-a";
  config.sample_sizes = {100};
  config.replicates = 1;
  config.z_grid = {0.5};
  config.k = 40;
  config.master_seed = 99;
  config.quadrature_panels = 1 << 12;
  const RiskReport report = run_experiment(config);
  REQUIRE(report.rows.size() == 1);
  const RiskRow& row = report.rows.front();
  CHECK(row.status == "ok");
  CHECK(row.n == 100);
  CHECK(row.z == 0.5);
  CHECK(row.replicate == 1);
  CHECK(row.i_risk >= 0.0);
  CHECK(row.coeff_sup_err >= 0.0);
  CHECK(row.lambda_ratio > 0.0);
}

TEST_CASE("reports are byte-identical across runs and orderly") {
  ExperimentConfig config;
  config.model = "model-a";
  config.sample_sizes = {100, 200};
  config.replicates = 3;
  config.z_grid = {0.2, 0.5};
  config.k = 40;
  config.master_seed = 2718;
  config.quadrature_panels = 1 << 12;

  const RiskReport r1 = run_experiment(config);
  const RiskReport r2 = run_experiment(config);
  std::ostringstream a, b;
  write_report_csv(a, r1);
  write_report_csv(b, r2);
  CHECK(a.str() == b.str());

  REQUIRE(r1.rows.size() == 12);
  std::size_t idx = 0;
  for (int n : config.sample_sizes)
    for (double z : config.z_grid)
      for (int rep = 1; rep <= 3; ++rep) {
        CHECK(r1.rows[idx].n == n);
        CHECK(r1.rows[idx].z == z);
        CHECK(r1.rows[idx].replicate == rep);
        ++idx;
      }
}

TEST_CASE("reports do not depend on the worker count") {
  ExperimentConfig config;
  config.model = "model-a";
  config.sample_sizes = {100};
  config.replicates = 4;
  config.z_grid = {0.3, 0.7};
  config.k = 40;
  config.master_seed = 31415;
  config.quadrature_panels = 1 << 12;

  setenv("FHT_THREADS", "1", 1);
  const RiskReport serial = run_experiment(config);
  setenv("FHT_THREADS", "3", 1);
  const RiskReport parallel = run_experiment(config);
  unsetenv("FHT_THREADS");

  std::ostringstream a, b;
  write_report_csv(a, serial);
  write_report_csv(b, parallel);
  CHECK(a.str() == b.str());
}

TEST_CASE("undersized samples are flagged rows, not failures") {
  ExperimentConfig config;
  config.model = "model-a";
  config.sample_sizes = {10};
  config.replicates = 2;
  config.z_grid = {0.5};
  config.k = 40;
  const RiskReport report = run_experiment(config);
  REQUIRE(report.rows.size() == 2);
  for (const auto& row : report.rows) {
    CHECK(row.status == "insufficient_data");
    CHECK(std::isnan(row.i_risk));
  }
}

TEST_CASE("tukey box statistics") {
  const BoxStats s = tukey_box_stats({1.0, 2.0, 3.0, 4.0, 100.0});
  CHECK(s.q1 == 2.0);
  CHECK(s.median == 3.0);
  CHECK(s.q3 == 4.0);
  CHECK(s.lo_whisker == 1.0);
  CHECK(s.hi_whisker == 4.0);  // 100 sits outside the 1.5 IQR fence
}

TEST_CASE("boxplot table covers each metric, size and query point") {
  ExperimentConfig config;
  config.model = "model-a";
  config.sample_sizes = {100};
  config.replicates = 3;
  config.z_grid = {0.3, 0.6};
  config.k = 40;
  config.quadrature_panels = 1 << 12;
  const RiskReport report = run_experiment(config);
  std::ostringstream os;
  write_boxplots_csv(os, report);
  std::istringstream in(os.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1 + 3 * 1 * 2);  // header + metrics x sizes x z
}
