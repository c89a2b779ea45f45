#pragma once

#include <span>
#include <vector>

namespace sentio {

struct BandSummary {
  double mean_coherence = 0.0;
  double mean_tau = 0.0;  // over reported phase lags only; NaN if none
  int n_freqs = 0;
  int n_tau = 0;
};

struct WelchResult {
  std::vector<double> freq;       // cycles per bin, j / nseg for j = 0..nseg/2
  std::vector<double> coherence;  // squared coherence
  std::vector<double> phase;      // radians; positive = first series leads
  std::vector<double> tau;        // phase / (2*pi*f) in bins; NaN where unreported
  int n_segments = 0;
  double c_mid = 0.0;  // share of coherence mass in the medium band; NaN if undefined
  BandSummary short_run, mid_run, long_run;
};

// Welch cross-spectral estimate: Hann window, 50% overlap, per-segment mean
// removal. Phase lags are reported only where squared coherence clears
// `coherence_floor` and the lag is inside the unambiguous range |tau| <
// 1/(2f). Bands by period T = 1/f: short T < short_max, medium
// short_max <= T <= long_min, long T > long_min; the zero-frequency bin is
// excluded everywhere. Undefined (n_segments == 0) when the series is
// shorter than one segment.
WelchResult welch_coherence(std::span<const double> s, std::span<const double> y, int nseg = 52,
                            double coherence_floor = 0.1, double short_max = 4.0,
                            double long_min = 13.0);

}  // namespace sentio
