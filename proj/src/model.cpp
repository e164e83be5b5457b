#include "fht/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fht {

std::string CovariateLaw::to_string() const {
  std::ostringstream os;
  if (kind == Kind::Uniform)
    os << "uniform " << a << " " << b;
  else
    os << "beta " << a << " " << b;
  return os.str();
}

CovariateLaw CovariateLaw::parse(const std::string& text) {
  std::istringstream is(text);
  std::string word;
  CovariateLaw law;
  if (!(is >> word)) throw ConfigError("empty covariate law");
  if (word == "uniform")
    law.kind = Kind::Uniform;
  else if (word == "beta")
    law.kind = Kind::Beta;
  else
    throw ConfigError("unknown covariate law '" + word + "'");
  if (!(is >> law.a >> law.b))
    throw ConfigError("covariate law '" + word + "' needs two parameters");
  if (law.kind == Kind::Uniform && !(law.a < law.b))
    throw ConfigError("uniform covariate law needs a < b");
  if (law.kind == Kind::Beta && (law.a <= 0.0 || law.b <= 0.0))
    throw ConfigError("beta covariate law needs positive shape parameters");
  return law;
}

std::string InitialLaw::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::UniformNonTerminal:
      os << "uniform_nonterminal";
      break;
    case Kind::Fixed:
      os << "fixed " << fixed_state + 1;
      break;
    case Kind::Weights:
      os << "weights";
      for (double w : weights) os << " " << w;
      break;
  }
  return os.str();
}

bool ModelSpec::is_terminal(int state) const {
  return std::binary_search(terminal_set.begin(), terminal_set.end(), state);
}

std::vector<double> ModelSpec::transition_at(double z) const {
  std::vector<double> p(transition_fn.size());
  for (std::size_t i = 0; i < transition_fn.size(); ++i) p[i] = transition_fn[i](z);
  return p;
}

std::vector<double> default_validation_grid(const ModelSpec& spec, int points) {
  const double lo = spec.covariate.lo();
  const double hi = spec.covariate.hi();
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return grid;
}

std::vector<Violation> validate_model(const ModelSpec& spec,
                                      const std::vector<double>& grid) {
  constexpr double kRowSumTol = 1e-12;
  std::vector<Violation> out;

  if (spec.n_states <= 0)
    out.push_back({0.0, -1, -1, "n_states must be positive", 0.0});
  if (spec.terminal_set.empty())
    out.push_back({0.0, -1, -1, "terminal set is empty", 0.0});
  for (int s : spec.terminal_set)
    if (s < 0 || s >= spec.n_states)
      out.push_back({0.0, s, -1, "terminal state out of range", 0.0});
  if (static_cast<int>(spec.transition_fn.size()) !=
      spec.n_states * spec.n_states)
    out.push_back({0.0, -1, -1, "transition matrix has wrong shape", 0.0});
  if (spec.initial.kind == InitialLaw::Kind::Weights) {
    if (static_cast<int>(spec.initial.weights.size()) != spec.n_states)
      out.push_back({0.0, -1, -1, "initial weights have wrong length", 0.0});
    double total = 0.0;
    for (double w : spec.initial.weights) {
      if (w < 0.0)
        out.push_back({0.0, -1, -1, "negative initial weight", w});
      total += w;
    }
    if (!(total > 0.0))
      out.push_back({0.0, -1, -1, "initial weights sum to zero", total});
  }
  if (spec.initial.kind == InitialLaw::Kind::Fixed &&
      (spec.initial.fixed_state < 0 || spec.initial.fixed_state >= spec.n_states))
    out.push_back({0.0, -1, -1, "fixed initial state out of range", 0.0});
  if (!out.empty()) return out;

  const int n = spec.n_states;
  for (double z : grid) {
    double lambda;
    std::vector<double> p;
    try {
      lambda = spec.rate_at(z);
      p = spec.transition_at(z);
    } catch (const ExprError& e) {
      throw ConfigError(std::string("model expression failed: ") + e.what());
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      out.push_back({z, -1, -1, "rate is not positive", lambda});
    for (int r = 0; r < n; ++r) {
      double sum = 0.0;
      for (int c = 0; c < n; ++c) {
        const double v = p[r * n + c];
        if (!(v >= 0.0) || !(v <= 1.0) || !std::isfinite(v))
          out.push_back({z, r, c, "transition entry outside [0,1]", v});
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowSumTol)
        out.push_back({z, r, -1, "row sum differs from 1", sum - 1.0});
    }
  }
  return out;
}

int Dataset::state_count() const {
  if (n_states > 0) return n_states;
  int max_label = -1;
  for (const auto& rec : records)
    for (int s : rec.states) max_label = std::max(max_label, s);
  return max_label + 1;
}

namespace {

int draw_initial_state(const ModelSpec& spec, Rng& rng) {
  switch (spec.initial.kind) {
    case InitialLaw::Kind::Fixed:
      return spec.initial.fixed_state;
    case InitialLaw::Kind::Weights:
      return rng.categorical(spec.initial.weights.data(), spec.n_states);
    case InitialLaw::Kind::UniformNonTerminal:
    default: {
      std::vector<int> pool;
      pool.reserve(spec.n_states);
      for (int s = 0; s < spec.n_states; ++s)
        if (!spec.is_terminal(s)) pool.push_back(s);
      if (pool.empty())
        throw ConfigError("all states terminal: no non-terminal start exists");
      return pool[rng.uniform_int(0, static_cast<int>(pool.size()) - 1)];
    }
  }
}

}  // namespace

ObservationRecord simulate_trajectory(const ModelSpec& spec, double z, Rng& rng,
                                      int forced_start) {
  const int limit = spec.limit.sample(rng);
  int state = forced_start >= 0 ? forced_start : draw_initial_state(spec, rng);
  if (state >= spec.n_states)
    throw ConfigError("start state out of range");

  const double lambda = spec.rate_at(z);
  const std::vector<double> p = spec.transition_at(z);
  const int n = spec.n_states;

  ObservationRecord rec;
  rec.z = {z};
  rec.limit_draw = limit;
  rec.states.push_back(state);

  double elapsed = 0.0;
  int jumps = 0;
  while (!spec.is_terminal(state) && jumps < limit) {
    elapsed += rng.exponential(lambda);
    state = rng.categorical(&p[state * n], n);
    rec.states.push_back(state);
    ++jumps;
  }

  rec.m = jumps;
  rec.hit_time = elapsed;
  rec.delta = spec.is_terminal(state);
  return rec;
}

Dataset simulate_dataset(const ModelSpec& spec, int n, Rng& rng) {
  if (n < 1) throw ConfigError("simulate_dataset: n must be >= 1");
  Dataset ds;
  ds.covariate_dim = spec.covariate_dim;
  ds.n_states = spec.n_states;
  ds.model_name = spec.name;
  ds.records.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double z = spec.covariate.sample(rng);
    ds.records.push_back(simulate_trajectory(spec, z, rng));
  }
  return ds;
}

namespace {

ModelSpec make_spec(std::string name, int n_states, std::vector<int> terminal,
                    CovariateLaw cov, LimitLaw limit, const char* rate,
                    const std::vector<const char*>& rows) {
  ModelSpec spec;
  spec.name = std::move(name);
  spec.n_states = n_states;
  spec.terminal_set = std::move(terminal);
  spec.covariate = cov;
  spec.limit = limit;
  spec.rate_fn = Expr::parse(rate);
  spec.transition_fn.reserve(rows.size());
  for (const char* cell : rows) spec.transition_fn.push_back(Expr::parse(cell));
  return spec;
}

}  // namespace

ModelSpec builtin_model_a() {
  // Rational-function chain on 6 states; rows renormalized so every row sum
  // is exactly 1 on [0,1].
  return make_spec(
      "model-a", 6, {4, 5}, CovariateLaw{CovariateLaw::Kind::Uniform, 0.0, 1.0},
      LimitLaw{5, 2.0}, "1 + z",
      {
          "0", "z/(1+z^2)", "0", "(1+z^2-z)/(1+z^2)", "0", "0",                      // 1
          "0", "0.5/(1+z+z^2)", "(0.4+z)/(1+z+z^2)", "0", "(0.1+z^2)/(1+z+z^2)", "0",  // 2
          "0.4", "0.3/(2+z)", "(0.6+0.6*z)/(2+z)", "0", "0", "0.3/(2+z)",            // 3
          "0.3", "0.5", "0", "0", "0.2", "0",                                        // 4
          "0", "0", "0", "(1+z)/(3+z)", "0", "2/(3+z)",                              // 5
          "0", "0", "0.3", "0", "0.5", "0.2",                                        // 6
      });
}

ModelSpec builtin_model_b() {
  // 7 states, states 6 and 7 terminal, state 5 absorbing and disconnected
  // from the terminal pair. Same row renormalization as model-a.
  return make_spec(
      "model-b", 7, {5, 6}, CovariateLaw{CovariateLaw::Kind::Beta, 1.4, 2.7},
      LimitLaw{6, 1.0}, "0.4 + 2*z^(3/4)",
      {
          "0", "(1.5+z)/(2+z+z^3)", "(0.5+0.3*z^3)/(2+z+z^3)", "0", "0",
          "0.7*z^3/(2+z+z^3)", "0",  // 1
          "0.5/(1+z)^2", "0", "0", "(0.3+1.5*z)/(1+z)^2", "(0.5*z+0.5*z^2)/(1+z)^2",
          "0", "(0.2+0.5*z^2)/(1+z)^2",  // 2
          "0", "0", "0.2", "0.4/(1+z)", "0", "(0.4+0.8*z)/(1+z)", "0",  // 3
          "0.1+0.3*sqrt(z)", "0", "0.3+0.1*sqrt(z)", "0", "0", "0",
          "0.6-0.4*sqrt(z)",  // 4
          "0", "0", "0", "0", "1", "0", "0",  // 5
          "0", "1", "0", "0", "0", "0", "0",  // 6
          "0", "0", "0", "0", "0.2", "0.8", "0",  // 7
      });
}

}  // namespace fht
