#pragma once

#include <span>
#include <vector>

namespace sentio {

struct ArmaOrder {
  int p = 0;
  int q = 0;
};

struct ArmaFit {
  ArmaOrder order;
  std::vector<double> ar;         // phi_1..phi_p
  std::vector<double> ma;         // theta_1..theta_q
  double mean = 0.0;              // removed before fitting
  double ssr = 0.0;               // conditional sum of squares, t >= p
  double aic = 0.0;
  bool converged = false;
  std::vector<double> residuals;  // t = p .. n-1, length n - p
};

// Conditional-sum-of-squares fit of a fixed (p, q) order on a demeaned
// series: Hannan-Rissanen start values, then damped Gauss-Newton. The input
// is demeaned internally; `mean` records what was removed.
ArmaFit fit_arma_css(std::span<const double> series, ArmaOrder order, int max_iter = 200,
                     double rel_tol = 1e-8);

struct ArmaSelection {
  ArmaFit best;
  int cells_tried = 0;
  int cells_skipped = 0;    // non-converged or degenerate
  bool fell_back = false;   // every cell failed; (0,0) residuals returned
};

// AIC order selection over p in [0, p_max], q in [0, q_max]. AICs are
// compared over the common sample t >= p_max so cells with different AR
// orders score the same observations. Needs >= 30 observations.
ArmaSelection fit_arma_aic(std::span<const double> series, int p_max = 4, int q_max = 2);

struct AdfResult {
  double t_stat = 0.0;
  double critical_5pct = 0.0;
  bool reject = false;  // reject unit root => treat as stationary
  int lags_used = 0;
  bool defined = false;  // false when the series is too short
};

// Augmented Dickey-Fuller regression with constant; lag order chosen
// top-down by the t-significance of the longest lag, starting at max_lag.
// The 5% critical value follows the MacKinnon response surface for the
// constant-only case. Needs >= 25 observations.
AdfResult adf_test(std::span<const double> series, int max_lag = 4);

// Stationarity safeguard: first-differences the series when the ADF test
// fails to reject (or leaves it untouched when too short to test).
std::vector<double> ensure_stationary(std::span<const double> series, int max_lag = 4,
                                      bool* differenced = nullptr);

}  // namespace sentio
