#pragma once

#include <span>
#include <vector>

#include "sentio/core.hpp"

namespace sentio {

// Fixed cross-sectional reporting block.
struct MetricSummary {
  double median = 0.0;
  double iqr = 0.0;
  double mean = 0.0;
  double std = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
  int n_entities = 0;
  int n_excluded = 0;
};

// Sum of |x(k) - x(k-1)| over consecutive non-missing pairs; pairs straddling
// a gap are skipped. NaN (entity excluded) with fewer than two usable values.
double total_variation(const GridSeries& series);

struct TvRatios {
  double f_over_a = 0.0;
  double s_over_f = 0.0;
  double s_over_a = 0.0;
};
// Elementwise ratios; NaN components where the denominator vanishes.
TvRatios tv_ratios(double tv_a, double tv_f, double tv_s);

// Mean absolute departure of the fill from the hold reference, over bins that
// were missing in the aggregated series and have an earlier observation.
// NaN when no such bin exists (entity excluded).
double gap_drift(const AggregatedSeries& aggregated, const FilledSeries& filled);

struct LagProxy {
  double rho_star = 0.0;
  int abs_lag = 0;
  bool defined = false;
};
// Pearson correlation between filled(k) and smoothed(k + lag) over
// lag in [-max_lag, max_lag]; argmax with ties toward smaller |lag|, then
// toward the negative sign. Lags with under min_overlap usable pairs or zero
// variance are skipped.
LagProxy lag_proxy(const FilledSeries& filled, const SmoothedSeries& smoothed, int max_lag = 2,
                   int min_overlap = 8);

// Summary over the non-NaN entries; NaN entries count as exclusions.
// Throws when nothing remains.
MetricSummary cross_section_summary(std::span<const double> per_entity_values);

}  // namespace sentio
