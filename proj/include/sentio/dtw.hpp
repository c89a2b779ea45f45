#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace sentio {

struct DtwAlignment {
  double cost = 0.0;
  std::vector<std::pair<int, int>> path;  // (i, j) pairs, start to end
  double pearson = 0.0;                   // over the aligned pairs
  bool defined = false;                   // false on zero-variance input
};

// Dynamic time warping under a Sakoe-Chiba band |i - j| <= band, squared
// local cost, steps {diagonal, up, left}. Both inputs are standardized to
// zero mean and unit variance first; the Pearson statistic is computed over
// the aligned path pairs. Inputs must have equal length.
DtwAlignment dtw_pearson(std::span<const double> x, std::span<const double> y, int band);

struct RollingDtwWindow {
  int start = 0;
  double r = 0.0;
  double p_perm = 1.0;
  bool defined = false;
};

struct RollingDtwResult {
  std::vector<RollingDtwWindow> windows;
  int n_valid = 0;
  double mean_r = 0.0;          // over valid windows; NaN if none
  double rejection_rate = 0.0;  // share of valid windows with p <= 0.05
};

// Rolling DTW-Pearson with a block-permutation p-value: the y window is
// permuted in consecutive blocks of `block` entries (last block may be
// short), p = (1 + #{|r*| >= |r|}) / (n_perm + 1). Windows containing any
// missing value are skipped. Per-window seeds are derived from (seed,
// window start), so parallel evaluation order cannot change results.
RollingDtwResult rolling_dtw(std::span<const double> s, std::span<const double> y,
                             int window = 52, int step = 4, int band = 8, int n_perm = 500,
                             int block = 8, std::uint64_t seed = 0);

}  // namespace sentio
