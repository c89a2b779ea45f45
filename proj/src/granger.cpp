#include "sentio/granger.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sentio/core.hpp"
#include "sentio/stats.hpp"

namespace sentio {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Builds the rows t in [from, to) where the target and every lag of both
// series are present. Column layout: const, own lags 1..L, other lags 1..L.
struct VarRows {
  Mat x_full;
  Mat x_restricted;  // const + own lags only
  Vec y;
  int rows = 0;
};

bool build_rows(std::span<const double> target, std::span<const double> own,
                std::span<const double> other, int from, int to, int lag, VarRows& out) {
  std::vector<int> usable;
  for (int t = std::max(from, lag); t < to; ++t) {
    bool ok = !is_missing(target[t]);
    for (int j = 1; ok && j <= lag; ++j)
      ok = !is_missing(own[t - j]) && !is_missing(other[t - j]);
    if (ok) usable.push_back(t);
  }
  out.rows = static_cast<int>(usable.size());
  if (out.rows == 0) return false;
  out.x_full.resize(out.rows, 1 + 2 * lag);
  out.x_restricted.resize(out.rows, 1 + lag);
  out.y.resize(out.rows);
  for (int i = 0; i < out.rows; ++i) {
    const int t = usable[i];
    out.y(i) = target[t];
    out.x_full(i, 0) = 1.0;
    out.x_restricted(i, 0) = 1.0;
    for (int j = 1; j <= lag; ++j) {
      out.x_full(i, j) = own[t - j];
      out.x_restricted(i, j) = own[t - j];
      out.x_full(i, lag + j) = other[t - j];
    }
  }
  return true;
}

// Residual sum of squares of an OLS fit; false when the normal equations are
// numerically singular.
bool ols_ssr(const Mat& x, const Vec& y, double& ssr) {
  const Mat xtx = x.transpose() * x;
  const Eigen::FullPivLU<Mat> lu(xtx);
  if (!lu.isInvertible()) return false;
  const Vec beta = lu.solve(x.transpose() * y);
  ssr = (y - x * beta).squaredNorm();
  return std::isfinite(ssr);
}

// SSR-based F statistic for excluding the other series' lags.
bool granger_f(std::span<const double> target, std::span<const double> own,
               std::span<const double> other, int from, int to, int lag, double& f, double& p,
               int& n_obs) {
  VarRows rows;
  if (!build_rows(target, own, other, from, to, lag, rows)) return false;
  n_obs = rows.rows;
  const int dof = rows.rows - (1 + 2 * lag);
  if (dof <= 0) return false;
  double ssr_u = 0.0, ssr_r = 0.0;
  if (!ols_ssr(rows.x_full, rows.y, ssr_u) || !ols_ssr(rows.x_restricted, rows.y, ssr_r))
    return false;
  if (!(ssr_u > 0.0)) return false;
  f = std::max(0.0, (ssr_r - ssr_u) / lag) / (ssr_u / dof);
  p = f_distribution_sf(f, lag, dof);
  return true;
}

}  // namespace

GrangerResult rolling_granger(std::span<const double> s, std::span<const double> y, int window,
                              int step, int lag_order, double significance) {
  if (s.size() != y.size()) throw std::invalid_argument("granger series length mismatch");
  if (window < 4 || step < 1 || lag_order < 1)
    throw std::invalid_argument("bad granger window parameters");

  const int n = static_cast<int>(s.size());
  const double floor_obs =
      std::max(0.8 * static_cast<double>(window), static_cast<double>(4 * lag_order + 10));

  GrangerResult res;
  for (int start = 0; start + window <= n; start += step) {
    GrangerWindow w;
    w.start = start;
    int n_sy = 0, n_ys = 0;
    double f_sy = 0.0, p_sy = 1.0, f_ys = 0.0, p_ys = 1.0;
    const bool ok_sy =
        granger_f(y, y, s, start, start + window, lag_order, f_sy, p_sy, n_sy);
    const bool ok_ys =
        granger_f(s, s, y, start, start + window, lag_order, f_ys, p_ys, n_ys);
    if (ok_sy && ok_ys && n_sy >= floor_obs && n_ys >= floor_obs && f_sy > 0.0 && f_ys > 0.0) {
      w.valid = true;
      w.n_obs = n_sy;
      w.f_sy = f_sy;
      w.p_sy = p_sy;
      w.f_ys = f_ys;
      w.p_ys = p_ys;
      w.delta_g = std::log(f_sy) - std::log(f_ys);
      ++res.n_valid;
      if (p_sy < significance) ++res.n_significant_sy;
      if (p_ys < significance) ++res.n_significant_ys;
    }
    res.windows.push_back(w);
  }
  res.significant_sy_fraction =
      res.n_valid > 0 ? static_cast<double>(res.n_significant_sy) / res.n_valid : missing();
  return res;
}

int select_var_order(std::span<const double> s, std::span<const double> y, int max_lag) {
  if (s.size() != y.size()) throw std::invalid_argument("granger series length mismatch");
  const int n = static_cast<int>(s.size());
  int best = 1;
  double best_aic = std::numeric_limits<double>::infinity();
  for (int lag = 1; lag <= max_lag; ++lag) {
    VarRows ry, rs;
    if (!build_rows(y, y, s, 0, n, lag, ry) || !build_rows(s, s, y, 0, n, lag, rs)) continue;
    if (ry.rows != rs.rows || ry.rows <= 2 * (1 + 2 * lag)) continue;
    double ssr_y = 0.0, ssr_s = 0.0;
    if (!ols_ssr(ry.x_full, ry.y, ssr_y) || !ols_ssr(rs.x_full, rs.y, ssr_s)) continue;
    const int t = ry.rows;
    // Bivariate AIC with a diagonal residual covariance approximation.
    const double aic = t * (std::log(ssr_y / t) + std::log(ssr_s / t)) +
                       2.0 * (2.0 * (1 + 2 * lag));
    if (aic < best_aic) {
      best_aic = aic;
      best = lag;
    }
  }
  return best;
}

}  // namespace sentio
