#ifndef FHT_BANDWIDTH_HPP
#define FHT_BANDWIDTH_HPP

#include <string>
#include <vector>

#include "fht/model.hpp"

namespace fht {

struct InsufficientDataError : std::runtime_error {
  explicit InsufficientDataError(const std::string& msg)
      : std::runtime_error(msg) {}
};

struct BandwidthGrid {
  std::vector<double> candidates;  // strictly increasing, all positive

  // 20 log-spaced candidates on [n^{-1/(2+p)}/4, 1], bracketing the
  // rate-optimal bandwidth order for Hoelder exponents up to 1.
  static BandwidthGrid default_for(int n, int covariate_dim = 1);
};

// Leave-one-out conditional predictive error of the kernel regression of
// E_M/M on Z, with each prediction evaluated at the left-out record's own
// covariate. Records with m = 0 are skipped; a left-out fit with no kernel
// mass falls back to the global mean of E_M/M.
double cpe(const Dataset& ds, double h);

// Literal fixed-query variant: every leave-one-out prediction is evaluated
// at the same covariate z instead of at Z_j.
double cpe_at(const Dataset& ds, double h, const std::vector<double>& z);

enum class FoldScheme {
  FixedBlocks,    // fold l drops records with 1-based indexes 10(l-1)+1..10l
  Proportional,   // fold l drops the l-th tenth of the sample
};

struct BandwidthSelection {
  double h = 0.0;
  std::vector<double> fold_h;  // per-fold minimizers, folds 1..10
};

// Tenfold subsampling: h_l = grid argmin of cpe on the l-th subsample (ties
// to the smaller candidate), returned bandwidth is the mean of h_1..h_10.
BandwidthSelection select_bandwidth(const Dataset& ds, const BandwidthGrid& grid,
                                    FoldScheme scheme = FoldScheme::FixedBlocks);

// Same tenfold scheme driven by the fixed-query error cpe_at(., z).
BandwidthSelection select_bandwidth_at(const Dataset& ds,
                                       const BandwidthGrid& grid,
                                       const std::vector<double>& z,
                                       FoldScheme scheme = FoldScheme::FixedBlocks);

}  // namespace fht

#endif
