#ifndef FHT_MODEL_HPP
#define FHT_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fht/expr.hpp"
#include "fht/rng.hpp"

namespace fht {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Law of the covariate Z. Built-in models use uniform[0,1] and Beta(a,b);
// both live on a compact interval which doubles as the validation domain.
struct CovariateLaw {
  enum class Kind { Uniform, Beta };
  Kind kind = Kind::Uniform;
  double a = 0.0;
  double b = 1.0;

  double lo() const { return kind == Kind::Uniform ? a : 0.0; }
  double hi() const { return kind == Kind::Uniform ? b : 1.0; }

  double sample(Rng& rng) const {
    return kind == Kind::Uniform ? rng.uniform(a, b) : rng.beta(a, b);
  }

  std::string to_string() const;
  static CovariateLaw parse(const std::string& text);
};

// L = base + Poisson(mean): the random cap on observed jumps.
struct LimitLaw {
  int base = 0;
  double poisson_mean = 1.0;

  int sample(Rng& rng) const { return base + rng.poisson(poisson_mean); }
};

// Law of the initial state Y_0. Defaults to uniform over the non-terminal
// states so every non-terminal start occurs with positive probability.
struct InitialLaw {
  enum class Kind { UniformNonTerminal, Fixed, Weights };
  Kind kind = Kind::UniformNonTerminal;
  int fixed_state = 0;              // 0-based
  std::vector<double> weights;      // size n_states when kind == Weights

  std::string to_string() const;
};

struct ModelSpec {
  std::string name;
  int n_states = 0;
  std::vector<int> terminal_set;    // sorted 0-based indices, nonempty
  int covariate_dim = 1;
  CovariateLaw covariate;
  LimitLaw limit;
  Expr rate_fn;                     // z -> lambda_z > 0
  std::vector<Expr> transition_fn;  // n_states*n_states, row-major
  InitialLaw initial;

  bool is_terminal(int state) const;
  double rate_at(double z) const { return rate_fn(z); }
  // Row-major n x n matrix P^(z).
  std::vector<double> transition_at(double z) const;
};

// Built-in specs, loadable by name.
ModelSpec builtin_model_a();
ModelSpec builtin_model_b();

// Resolves "model-a"/"model-b" or falls through to a spec file path.
ModelSpec load_model(const std::string& name_or_path);

struct Violation {
  double z = 0.0;
  int row = -1;  // -1 for spec-level defects independent of the grid point
  int col = -1;  // -1 for row-level defects
  std::string what;
  double magnitude = 0.0;
};

std::vector<double> default_validation_grid(const ModelSpec& spec,
                                            int points = 101);
std::vector<Violation> validate_model(const ModelSpec& spec,
                                      const std::vector<double>& grid);

// One censored trajectory: covariate, visited states Y_0..Y_M, the elapsed
// time E_M at the last observed jump, the censoring indicator and M itself.
struct ObservationRecord {
  std::vector<double> z;
  std::vector<int> states;  // length m+1, 0-based
  double hit_time = 0.0;    // E_M; censoring time when delta == false
  bool delta = false;
  int m = 0;
  int limit_draw = -1;      // drawn L; debug metadata, not serialized
};

struct Dataset {
  std::vector<ObservationRecord> records;
  int covariate_dim = 1;
  int n_states = 0;  // 0 = unknown, infer from the records
  std::uint64_t seed = 0;
  std::string model_name;

  int state_count() const;  // n_states or 1 + max label seen
};

// Walks the jump chain under P^(z) with Exp(lambda_z) holding times until it
// enters the terminal set or exhausts the drawn limit L. A forced_start >= 0
// overrides the initial law for this call.
ObservationRecord simulate_trajectory(const ModelSpec& spec, double z, Rng& rng,
                                      int forced_start = -1);

Dataset simulate_dataset(const ModelSpec& spec, int n, Rng& rng);

}  // namespace fht

#endif
