#pragma once

#include <span>
#include <vector>

namespace sentio {

struct GrangerWindow {
  int start = 0;        // first bin of the window
  int n_obs = 0;        // usable regression rows
  double f_sy = 0.0;    // F statistic, s-lags excluded from the y equation
  double f_ys = 0.0;    // F statistic, y-lags excluded from the s equation
  double p_sy = 1.0;
  double p_ys = 1.0;
  double delta_g = 0.0;  // log f_sy - log f_ys
  bool valid = false;
};

struct GrangerResult {
  std::vector<GrangerWindow> windows;
  int n_valid = 0;
  int n_significant_sy = 0;
  int n_significant_ys = 0;
  double significant_sy_fraction = 0.0;  // over valid windows
};

// Rolling bivariate VAR(lag_order) Granger tests via per-equation least
// squares and SSR-based F statistics. Windows with fewer than
// max(0.8 * window, 4 * lag + 10) usable rows, or a singular regressor
// matrix, are skipped. NaN entries in either series drop the affected rows.
GrangerResult rolling_granger(std::span<const double> s, std::span<const double> y,
                              int window = 52, int step = 4, int lag_order = 2,
                              double significance = 0.05);

// Full-sample VAR lag order by AIC over 1..max_lag.
int select_var_order(std::span<const double> s, std::span<const double> y, int max_lag = 8);

}  // namespace sentio
