#include "sentio/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sentio/core.hpp"
#include "sentio/stats.hpp"

namespace sentio {

std::vector<double> rolling_minmax(std::span<const double> x, int window) {
  if (window < 2) throw std::invalid_argument("rolling minmax window must be >= 2");
  const int n = static_cast<int>(x.size());
  std::vector<double> out(n, missing());
  for (int k = window - 1; k < n; ++k) {
    double lo = x[k], hi = x[k];
    bool complete = true;
    for (int j = k - window + 1; j <= k && complete; ++j) {
      if (is_missing(x[j])) {
        complete = false;
        break;
      }
      lo = std::min(lo, x[j]);
      hi = std::max(hi, x[j]);
    }
    if (!complete) continue;
    out[k] = hi > lo ? (x[k] - lo) / (hi - lo) : 0.5;
  }
  return out;
}

std::vector<double> rolling_log_return(std::span<const double> prices, int window) {
  if (window < 1) throw std::invalid_argument("log return window must be >= 1");
  const int n = static_cast<int>(prices.size());
  std::vector<double> out(n, missing());
  for (int k = 0; k < n; ++k) {
    if (!is_missing(prices[k]) && !(prices[k] > 0.0))
      throw std::invalid_argument("nonpositive price");
    if (k < window) continue;
    if (is_missing(prices[k]) || is_missing(prices[k - window])) continue;
    out[k] = std::log(prices[k]) - std::log(prices[k - window]);
  }
  return out;
}

std::string_view price_transform_name(PriceTransform t) {
  switch (t) {
    case PriceTransform::log_return: return "log_return";
    case PriceTransform::minmax: return "minmax";
  }
  return "?";
}

CcfResult prewhitened_ccf(std::span<const double> s_resid, std::span<const double> y_resid,
                          int kappa_max) {
  if (kappa_max < 0) throw std::invalid_argument("negative ccf lag range");
  CcfResult res;
  res.kappa_max = kappa_max;
  const int n = static_cast<int>(std::min(s_resid.size(), y_resid.size()));
  if (n < 20) return res;

  double ns = 0.0, ny = 0.0;
  for (int k = 0; k < n; ++k) {
    ns += s_resid[k] * s_resid[k];
    ny += y_resid[k] * y_resid[k];
  }
  if (!(ns > 0.0) || !(ny > 0.0)) return res;
  const double norm = std::sqrt(ns) * std::sqrt(ny);

  res.rho.assign(2 * kappa_max + 1, 0.0);
  for (int lag = -kappa_max; lag <= kappa_max; ++lag) {
    double acc = 0.0;
    for (int k = std::max(0, -lag); k < n - std::max(0, lag); ++k)
      acc += s_resid[k] * y_resid[k + lag];
    res.rho[static_cast<std::size_t>(lag + kappa_max)] = acc / norm;
  }
  res.n = n;
  res.ci_band = 1.96 / std::sqrt(static_cast<double>(n));

  // Peak with ties toward smaller |lag|, negative before positive.
  bool first = true;
  auto consider = [&](int lag) {
    const double v = res.rho_at(lag);
    if (first || v > res.peak_rho) {
      res.peak_rho = v;
      res.peak_lag = lag;
      first = false;
    }
  };
  consider(0);
  for (int l = 1; l <= kappa_max; ++l) {
    consider(-l);
    consider(l);
  }
  res.defined = true;
  return res;
}

std::string_view fisher_weights_name(FisherWeights w) {
  switch (w) {
    case FisherWeights::mean: return "mean";
    case FisherWeights::count: return "n";
    case FisherWeights::sqrt_count: return "sqrt_n";
    case FisherWeights::log_count: return "log_n";
    case FisherWeights::count_squared: return "n2";
    case FisherWeights::median: return "median";
  }
  return "?";
}

double fisher_aggregate(std::span<const double> rhos, FisherWeights mode,
                        std::span<const double> counts) {
  if (rhos.empty()) throw std::invalid_argument("fisher aggregation of empty set");
  const bool weighted = mode == FisherWeights::count || mode == FisherWeights::sqrt_count ||
                        mode == FisherWeights::log_count || mode == FisherWeights::count_squared;
  if (weighted && counts.size() != rhos.size())
    throw std::invalid_argument("fisher aggregation weights need per-entity counts");

  constexpr double kClamp = 1.0 - 1e-12;
  std::vector<double> z(rhos.size());
  for (std::size_t i = 0; i < rhos.size(); ++i)
    z[i] = std::atanh(std::clamp(rhos[i], -kClamp, kClamp));

  double agg = 0.0;
  if (mode == FisherWeights::median) {
    agg = quantile(z, 0.5);
  } else if (!weighted) {
    agg = mean(z);
  } else {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      double w = counts[i];
      switch (mode) {
        case FisherWeights::count: break;
        case FisherWeights::sqrt_count: w = std::sqrt(w); break;
        case FisherWeights::log_count: w = std::log1p(w); break;
        case FisherWeights::count_squared: w = w * w; break;
        default: break;
      }
      num += w * z[i];
      den += w;
    }
    if (!(den > 0.0)) throw std::invalid_argument("fisher aggregation weights sum to zero");
    agg = num / den;
  }
  return std::tanh(agg);
}

double fisher_combined_pvalue(std::span<const double> pvals) {
  if (pvals.empty()) throw std::invalid_argument("fisher combination of empty set");
  double stat = 0.0;
  for (double p : pvals) {
    if (!(p > 0.0) || p > 1.0) p = std::clamp(p, 1e-300, 1.0);
    stat += -2.0 * std::log(std::max(p, 1e-300));
  }
  return chi_squared_sf(stat, 2.0 * static_cast<double>(pvals.size()));
}

void composite_score(std::span<ConsistencyRow> rows) {
  const std::size_t n = rows.size();
  for (auto& r : rows) r.score = 0.0;
  if (n == 0) return;

  auto column = [&](auto getter) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = getter(rows[i]);
    return v;
  };
  const std::vector<std::pair<std::vector<double>, double>> parts = {
      {column([](const ConsistencyRow& r) { return r.ccf_rho; }), 0.4},
      {column([](const ConsistencyRow& r) { return r.granger_sp_pct; }), 0.3},
      {column([](const ConsistencyRow& r) { return r.mid_coh; }), 0.2},
      {column([](const ConsistencyRow& r) { return r.dtw_mean; }), 0.1},
  };
  for (const auto& [values, weight] : parts) {
    const double m = mean(values);
    const double sd = sample_std(values);
    if (!(sd > 0.0)) continue;  // constant column contributes nothing
    for (std::size_t i = 0; i < n; ++i) rows[i].score += weight * (values[i] - m) / sd;
  }
}

}  // namespace sentio
