#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sentio {

// ---------------------------------------------------------------------------
// Price transforms
// ---------------------------------------------------------------------------

// Position of x(k) inside its trailing-window range, in [0,1]; 0.5 for a flat
// window. Missing until `window` observations are available or when any
// window entry is missing.
std::vector<double> rolling_minmax(std::span<const double> x, int window);

// ln P(k) - ln P(k - window); missing when either endpoint is missing.
// Throws on nonpositive prices.
std::vector<double> rolling_log_return(std::span<const double> prices, int window);

enum class PriceTransform { log_return, minmax };
std::string_view price_transform_name(PriceTransform t);

// ---------------------------------------------------------------------------
// Prewhitened cross-correlation
// ---------------------------------------------------------------------------

struct CcfResult {
  int kappa_max = 0;
  std::vector<double> rho;  // index i corresponds to lag i - kappa_max
  double ci_band = 0.0;     // 1.96 / sqrt(n)
  int n = 0;                // matched residual pairs at lag 0
  int peak_lag = 0;         // argmax rho; ties to smaller |lag|, then negative
  double peak_rho = 0.0;
  bool defined = false;

  double rho_at(int lag) const { return rho[static_cast<std::size_t>(lag + kappa_max)]; }
};

// Cross-correlation of two prewhitened residual series; positive lag means
// the first series leads. Sums run over the overlapping range, norms over the
// full samples; n >= 20 pairs required.
CcfResult prewhitened_ccf(std::span<const double> s_resid, std::span<const double> y_resid,
                          int kappa_max = 12);

// ---------------------------------------------------------------------------
// Cross-entity aggregation
// ---------------------------------------------------------------------------

enum class FisherWeights { mean, count, sqrt_count, log_count, count_squared, median };
std::string_view fisher_weights_name(FisherWeights w);

// Fisher r-to-z aggregation of per-entity correlations; `counts` carries the
// per-entity article totals for the weighted modes (ignored otherwise).
// Inputs are clamped to |rho| <= 1 - 1e-12. Throws on an empty set.
double fisher_aggregate(std::span<const double> rhos, FisherWeights mode,
                        std::span<const double> counts = {});

// Fisher's combined probability: -2 sum(ln p) against chi^2 with 2m dof.
// p-values floored at 1e-300. Throws on an empty set.
double fisher_combined_pvalue(std::span<const double> pvals);

// ---------------------------------------------------------------------------
// Cross-configuration scoring
// ---------------------------------------------------------------------------

struct ConsistencyRow {
  std::string config_id;
  int n_entities = 0;
  int ccf_lag = 0;
  double ccf_rho = 0.0;
  double granger_sp_pct = 0.0;  // percent of significant sentiment->price windows
  double mid_coh = 0.0;
  double dtw_mean = 0.0;
  double score = 0.0;
};

// Fills `score` with the 0.4/0.3/0.2/0.1-weighted sum of the z-scored
// ccf_rho, granger_sp_pct, mid_coh and dtw_mean columns. A constant column
// contributes zero for every row.
void composite_score(std::span<ConsistencyRow> rows);

}  // namespace sentio
