#include "sentio/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sentio/stats.hpp"

namespace sentio {

double total_variation(const GridSeries& series) {
  double tv = 0.0;
  std::size_t pairs = 0, observed = 0;
  for (std::size_t k = 0; k < series.values.size(); ++k) {
    if (is_missing(series.values[k])) continue;
    ++observed;
    if (k > 0 && !is_missing(series.values[k - 1])) {
      tv += std::abs(series.values[k] - series.values[k - 1]);
      ++pairs;
    }
  }
  if (observed < 2 || pairs == 0) return missing();
  return tv;
}

TvRatios tv_ratios(double tv_a, double tv_f, double tv_s) {
  TvRatios r;
  r.f_over_a = tv_a > 0.0 ? tv_f / tv_a : missing();
  r.s_over_f = tv_f > 0.0 ? tv_s / tv_f : missing();
  r.s_over_a = tv_a > 0.0 ? tv_s / tv_a : missing();
  return r;
}

double gap_drift(const AggregatedSeries& aggregated, const FilledSeries& filled) {
  const GridSeries& agg = aggregated.series;
  const GridSeries& fil = filled.series;
  if (agg.values.size() != fil.values.size())
    throw std::invalid_argument("gap_drift requires series on the same grid");

  double sum = 0.0;
  std::size_t n = 0;
  std::ptrdiff_t last_observed = -1;
  for (std::size_t k = 0; k < agg.values.size(); ++k) {
    if (!is_missing(agg.values[k])) {
      last_observed = static_cast<std::ptrdiff_t>(k);
      continue;
    }
    if (last_observed < 0) continue;     // no hold reference yet
    if (is_missing(fil.values[k])) continue;  // fill rule none: bin never filled
    sum += std::abs(fil.values[k] - agg.values[last_observed]);
    ++n;
  }
  if (n == 0) return missing();
  return sum / static_cast<double>(n);
}

LagProxy lag_proxy(const FilledSeries& filled, const SmoothedSeries& smoothed, int max_lag,
                   int min_overlap) {
  const GridSeries& f = filled.series;
  const GridSeries& s = smoothed.series;
  if (f.values.size() != s.values.size())
    throw std::invalid_argument("lag_proxy requires series on the same grid");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.values.size());

  // Preference order implements the tie rules: smaller |lag| first, negative
  // before positive; a later candidate must be strictly better to win.
  std::vector<int> order;
  order.push_back(0);
  for (int l = 1; l <= max_lag; ++l) {
    order.push_back(-l);
    order.push_back(l);
  }

  LagProxy best;
  for (int lag : order) {
    std::vector<double> xs, ys;
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const std::ptrdiff_t j = k + lag;
      if (j < 0 || j >= n) continue;
      if (is_missing(f.values[k]) || is_missing(s.values[j])) continue;
      xs.push_back(f.values[k]);
      ys.push_back(s.values[j]);
    }
    if (static_cast<int>(xs.size()) < min_overlap) continue;
    const double rho = pearson(xs, ys);
    if (is_missing(rho)) continue;  // zero variance in a window
    if (!best.defined || rho > best.rho_star) {
      best.defined = true;
      best.rho_star = rho;
      best.abs_lag = std::abs(lag);
    }
  }
  return best;
}

MetricSummary cross_section_summary(std::span<const double> values) {
  std::vector<double> included;
  int excluded = 0;
  for (double v : values) {
    if (is_missing(v))
      ++excluded;
    else
      included.push_back(v);
  }
  if (included.empty()) throw std::invalid_argument("cross-section summary of empty set");

  MetricSummary s;
  s.n_entities = static_cast<int>(included.size());
  s.n_excluded = excluded;
  s.median = quantile(included, 0.5);
  s.iqr = quantile(included, 0.75) - quantile(included, 0.25);
  s.mean = mean(included);
  s.std = sample_std(included);
  s.q10 = quantile(included, 0.10);
  s.q90 = quantile(included, 0.90);
  return s;
}

}  // namespace sentio
