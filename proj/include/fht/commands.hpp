#ifndef FHT_COMMANDS_HPP
#define FHT_COMMANDS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace fht {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Options mirror the CLI flags one-to-one; every command writes a
// <output>.manifest.json sidecar capturing enough to reproduce the output.

struct SimulateOptions {
  std::string model;      // builtin name or spec file path
  int n = 0;
  std::uint64_t seed = 0;
  std::string out;        // dataset path
  int start_label = 0;    // 1-based forced start; 0 = use the model's law
};

struct EstimateOptions {
  std::string data;
  std::vector<double> z;
  int k = 130;
  double h = 0.0;         // 0 = select via tenfold CPE
  double rate_cap = 5.0;
  double tmax = 0.0;      // 0 = per-z horizon from the fitted rate
  int tpoints = 201;
  std::string out;        // prefix: writes <out>.fits.csv etc.
  std::vector<double> bandwidth_grid;  // empty = default grid
};

struct OracleOptions {
  std::string model;
  double z = 0.0;
  int k = 130;
  std::string coeffs_out;   // optional
  std::string density_out;  // optional
  double tmax = 0.0;        // 0 = horizon from the model rate
  int tpoints = 201;
};

struct BandwidthOptions {
  std::string data;
  std::vector<double> grid;  // empty = default grid
  bool proportional_folds = false;
  std::string out;           // empty = stdout
};

struct BenchOptions {
  std::string config;
  std::string out_dir;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
};

int cmd_simulate(const SimulateOptions& opt);
int cmd_estimate(const EstimateOptions& opt);
int cmd_oracle(const OracleOptions& opt);
int cmd_bandwidth(const BandwidthOptions& opt);
int cmd_bench(const BenchOptions& opt);

}  // namespace fht

#endif
