#include "sentio/arma.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sentio/core.hpp"
#include "sentio/stats.hpp"

namespace sentio {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// CSS residual recursion on a demeaned series. e_t = 0 for t < p; residuals
// with index < p referenced by the MA part are treated as zero.
bool css_residuals(const std::vector<double>& x, const Vec& phi, const Vec& theta,
                   std::vector<double>& e) {
  const int n = static_cast<int>(x.size());
  const int p = static_cast<int>(phi.size());
  const int q = static_cast<int>(theta.size());
  e.assign(n, 0.0);
  for (int t = p; t < n; ++t) {
    double v = x[t];
    for (int i = 0; i < p; ++i) v -= phi[i] * x[t - 1 - i];
    for (int j = 0; j < q; ++j) {
      const int s = t - 1 - j;
      if (s >= p) v -= theta[j] * e[s];
    }
    if (!std::isfinite(v) || std::abs(v) > 1e100) return false;
    e[t] = v;
  }
  return true;
}

double css_ssr(const std::vector<double>& e, int from) {
  double s = 0.0;
  for (std::size_t t = static_cast<std::size_t>(from); t < e.size(); ++t) s += e[t] * e[t];
  return s;
}

// Jacobian of the residual vector (t >= p) w.r.t. [phi, theta] via the
// derivative recursions of the CSS recursion.
void css_jacobian(const std::vector<double>& x, const Vec& phi, const Vec& theta,
                  const std::vector<double>& e, Mat& jac) {
  const int n = static_cast<int>(x.size());
  const int p = static_cast<int>(phi.size());
  const int q = static_cast<int>(theta.size());
  const int m = p + q;
  jac.setZero(n - p, m);
  // d[t][c]: derivative of e_t w.r.t. parameter c, stored for the last q steps.
  Mat d = Mat::Zero(n, m);
  for (int t = p; t < n; ++t) {
    for (int c = 0; c < m; ++c) {
      double g = 0.0;
      if (c < p) {
        g = -x[t - 1 - c];
      } else {
        const int s = t - 1 - (c - p);
        if (s >= p) g = -e[s];
      }
      for (int j = 0; j < q; ++j) {
        const int s = t - 1 - j;
        if (s >= p) g -= theta[j] * d(s, c);
      }
      d(t, c) = g;
      jac(t - p, c) = g;
    }
  }
}

// OLS helper returning coefficients for y ~ X (no intercept column implied).
Vec ols(const Mat& X, const Vec& y) { return X.colPivHouseholderQr().solve(y); }

// Hannan-Rissanen start values: a long-AR pass estimates innovations, then a
// single OLS on lagged values and lagged innovation estimates.
void hannan_rissanen(const std::vector<double>& x, int p, int q, Vec& phi, Vec& theta) {
  const int n = static_cast<int>(x.size());
  phi = Vec::Zero(p);
  theta = Vec::Zero(q);
  if (p + q == 0) return;

  std::vector<double> eps(n, 0.0);
  if (q > 0) {
    int m = std::min(std::max(p + q + 4, 4), std::max(n / 3, 1));
    if (n - m <= m + 2) return;  // too short for a long-AR pass; zero start values
    Mat X(n - m, m);
    Vec y(n - m);
    for (int t = m; t < n; ++t) {
      y(t - m) = x[t];
      for (int i = 0; i < m; ++i) X(t - m, i) = x[t - 1 - i];
    }
    const Vec a = ols(X, y);
    for (int t = m; t < n; ++t) {
      double v = x[t];
      for (int i = 0; i < m; ++i) v -= a(i) * x[t - 1 - i];
      eps[t] = v;
    }
    const int t0 = std::max(p, m + q);
    if (n - t0 > p + q + 2) {
      Mat Z(n - t0, p + q);
      Vec y2(n - t0);
      for (int t = t0; t < n; ++t) {
        y2(t - t0) = x[t];
        for (int i = 0; i < p; ++i) Z(t - t0, i) = x[t - 1 - i];
        for (int j = 0; j < q; ++j) Z(t - t0, p + j) = eps[t - 1 - j];
      }
      const Vec b = ols(Z, y2);
      for (int i = 0; i < p; ++i) phi(i) = b(i);
      for (int j = 0; j < q; ++j) theta(j) = b(p + j);
    }
  } else {
    // Pure AR: direct OLS on lagged values.
    Mat X(n - p, p);
    Vec y(n - p);
    for (int t = p; t < n; ++t) {
      y(t - p) = x[t];
      for (int i = 0; i < p; ++i) X(t - p, i) = x[t - 1 - i];
    }
    phi = ols(X, y);
  }
  // Pull wild starts back toward a sane region.
  for (int i = 0; i < p; ++i) phi(i) = std::clamp(phi(i), -0.98, 0.98);
  for (int j = 0; j < q; ++j) theta(j) = std::clamp(theta(j), -0.98, 0.98);
}

}  // namespace

ArmaFit fit_arma_css(std::span<const double> series, ArmaOrder order, int max_iter,
                     double rel_tol) {
  const int n = static_cast<int>(series.size());
  const int p = order.p, q = order.q;
  if (p < 0 || q < 0) throw std::invalid_argument("negative ARMA order");
  if (n < 2 * (p + q) + 8) throw std::invalid_argument("series too short for the ARMA order");

  ArmaFit fit;
  fit.order = order;
  fit.mean = mean(series);
  std::vector<double> x(series.begin(), series.end());
  for (double& v : x) v -= fit.mean;

  Vec phi, theta;
  hannan_rissanen(x, p, q, phi, theta);

  std::vector<double> e;
  if (!css_residuals(x, phi, theta, e)) {
    phi.setZero();
    theta.setZero();
    css_residuals(x, phi, theta, e);
  }
  double ssr = css_ssr(e, p);

  if (p + q == 0) {
    fit.converged = true;
  } else {
    double lambda = 1e-3;
    bool converged = false;
    Mat jac;
    for (int iter = 0; iter < max_iter; ++iter) {
      css_jacobian(x, phi, theta, e, jac);
      Vec ev(n - p);
      for (int t = p; t < n; ++t) ev(t - p) = e[t];
      const Mat h = jac.transpose() * jac;
      const Vec g = jac.transpose() * ev;

      bool stepped = false;
      for (int attempt = 0; attempt < 12; ++attempt) {
        Mat hd = h;
        for (int i = 0; i < hd.rows(); ++i) hd(i, i) += lambda * std::max(h(i, i), 1e-12);
        const Vec step = hd.ldlt().solve(-g);
        Vec phi_try = phi + step.head(p);
        Vec theta_try = theta + step.tail(q);
        std::vector<double> e_try;
        if (css_residuals(x, phi_try, theta_try, e_try)) {
          const double ssr_try = css_ssr(e_try, p);
          if (std::isfinite(ssr_try) && ssr_try <= ssr) {
            const double rel = (ssr - ssr_try) / std::max(ssr, 1e-300);
            phi = phi_try;
            theta = theta_try;
            e = std::move(e_try);
            ssr = ssr_try;
            lambda = std::max(lambda * 0.3, 1e-10);
            stepped = true;
            if (rel < rel_tol) converged = true;
            break;
          }
        }
        lambda *= 10.0;
      }
      if (converged || !stepped) {
        if (!stepped && iter > 0) converged = true;  // stuck at a flat minimum
        break;
      }
    }
    fit.converged = converged;
  }

  fit.ar.assign(phi.data(), phi.data() + p);
  fit.ma.assign(theta.data(), theta.data() + q);
  fit.ssr = ssr;
  const int n_eff = n - p;
  fit.aic = n_eff * std::log(ssr / n_eff) + 2.0 * (p + q + 1);
  fit.residuals.assign(e.begin() + p, e.end());
  return fit;
}

ArmaSelection fit_arma_aic(std::span<const double> series, int p_max, int q_max) {
  const int n = static_cast<int>(series.size());
  if (n < 30) throw std::invalid_argument("ARMA order selection needs >= 30 observations");

  ArmaSelection sel;
  double best_aic = std::numeric_limits<double>::infinity();
  bool have_best = false;

  for (int p = 0; p <= p_max; ++p) {
    for (int q = 0; q <= q_max; ++q) {
      ++sel.cells_tried;
      ArmaFit fit;
      try {
        fit = fit_arma_css(series, {p, q});
      } catch (const std::exception&) {
        ++sel.cells_skipped;
        continue;
      }
      if (!fit.converged || !std::isfinite(fit.ssr) || fit.ssr <= 0.0) {
        ++sel.cells_skipped;
        continue;
      }
      // Score every cell over the common sample t >= p_max.
      double common_ssr = 0.0;
      const int shift = p_max - p;  // residuals start at index p
      for (std::size_t t = static_cast<std::size_t>(shift); t < fit.residuals.size(); ++t)
        common_ssr += fit.residuals[t] * fit.residuals[t];
      const int n_common = n - p_max;
      if (common_ssr <= 0.0) {
        ++sel.cells_skipped;
        continue;
      }
      const double aic = n_common * std::log(common_ssr / n_common) + 2.0 * (p + q + 1);
      if (!have_best || aic < best_aic) {
        best_aic = aic;
        fit.aic = aic;
        sel.best = std::move(fit);
        have_best = true;
      }
    }
  }

  if (!have_best) {
    // Every cell failed: fall back to white noise around the mean.
    sel.fell_back = true;
    sel.best = fit_arma_css(series, {0, 0});
  }
  return sel;
}

AdfResult adf_test(std::span<const double> series, int max_lag) {
  AdfResult res;
  const int n = static_cast<int>(series.size());
  if (n < 25) return res;  // undefined; caller passes the series through

  std::vector<double> y(series.begin(), series.end());
  std::vector<double> dy(n - 1);
  for (int t = 1; t < n; ++t) dy[t - 1] = y[t] - y[t - 1];

  // Top-down lag selection on the t-statistic of the longest lag.
  int lag = std::min(max_lag, std::max(0, (n - 10) / 5));
  auto fit_at = [&](int L, double& t_rho, double& t_last, int& nobs) -> bool {
    // Rows: t = L .. n-2 indexes dy; regressors: const, y_{t-1}, dy lags.
    const int rows = static_cast<int>(dy.size()) - L;
    const int cols = 2 + L;
    if (rows <= cols + 2) return false;
    Mat X(rows, cols);
    Vec b(rows);
    for (int i = 0; i < rows; ++i) {
      const int t = i + L;  // index into dy
      b(i) = dy[t];
      X(i, 0) = 1.0;
      X(i, 1) = y[t];  // y_{t-1} for dy[t] = y[t+1]-y[t]
      for (int j = 1; j <= L; ++j) X(i, 1 + j) = dy[t - j];
    }
    const Mat xtx = X.transpose() * X;
    const Eigen::LDLT<Mat> solver(xtx);
    if (solver.info() != Eigen::Success) return false;
    const Vec beta = solver.solve(X.transpose() * b);
    const Vec resid = b - X * beta;
    const int dof = rows - cols;
    if (dof <= 0) return false;
    const double sigma2 = resid.squaredNorm() / dof;
    const Mat cov = sigma2 * solver.solve(Mat::Identity(cols, cols));
    const double se_rho = std::sqrt(std::max(cov(1, 1), 0.0));
    const double se_last = std::sqrt(std::max(cov(cols - 1, cols - 1), 0.0));
    if (!(se_rho > 0.0)) return false;
    t_rho = beta(1) / se_rho;
    t_last = L > 0 && se_last > 0.0 ? beta(cols - 1) / se_last : 0.0;
    nobs = rows;
    return true;
  };

  double t_rho = 0.0, t_last = 0.0;
  int nobs = 0;
  while (lag > 0) {
    if (!fit_at(lag, t_rho, t_last, nobs)) {
      --lag;
      continue;
    }
    if (std::abs(t_last) >= 1.645) break;  // keep this lag
    --lag;
  }
  if (!fit_at(lag, t_rho, t_last, nobs)) return res;

  // MacKinnon response-surface 5% critical value, constant-only case.
  const double T = static_cast<double>(nobs);
  const double crit = -2.86154 - 2.8903 / T - 4.234 / (T * T) - 40.04 / (T * T * T);

  res.defined = true;
  res.t_stat = t_rho;
  res.critical_5pct = crit;
  res.reject = t_rho < crit;
  res.lags_used = lag;
  return res;
}

std::vector<double> ensure_stationary(std::span<const double> series, int max_lag,
                                      bool* differenced) {
  if (differenced) *differenced = false;
  const AdfResult adf = adf_test(series, max_lag);
  if (!adf.defined || adf.reject) return std::vector<double>(series.begin(), series.end());
  if (differenced) *differenced = true;
  std::vector<double> out;
  out.reserve(series.size() > 0 ? series.size() - 1 : 0);
  for (std::size_t t = 1; t < series.size(); ++t) out.push_back(series[t] - series[t - 1]);
  return out;
}

}  // namespace sentio
