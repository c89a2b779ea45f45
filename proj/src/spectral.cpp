#include "sentio/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "sentio/core.hpp"

namespace sentio {

namespace {

using cd = std::complex<double>;

// Direct DFT of a windowed, de-meaned segment at the one-sided frequencies.
// Segment lengths here are tens of bins, so O(n^2) is immaterial.
void segment_spectrum(std::span<const double> x, std::span<const double> window,
                      std::vector<cd>& out) {
  const int n = static_cast<int>(x.size());
  const int nf = n / 2 + 1;
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  out.assign(nf, cd{0.0, 0.0});
  for (int j = 0; j < nf; ++j) {
    cd acc{0.0, 0.0};
    const double w = -2.0 * std::numbers::pi * j / n;
    for (int k = 0; k < n; ++k) {
      const double a = (x[k] - m) * window[k];
      acc += cd{a * std::cos(w * k), a * std::sin(w * k)};
    }
    out[j] = acc;
  }
}

}  // namespace

WelchResult welch_coherence(std::span<const double> s, std::span<const double> y, int nseg,
                            double coherence_floor, double short_max, double long_min) {
  if (s.size() != y.size()) throw std::invalid_argument("welch series length mismatch");
  if (nseg < 4) throw std::invalid_argument("welch segment length too small");

  WelchResult res;
  const int n = static_cast<int>(s.size());
  if (n < nseg) return res;  // undefined

  std::vector<double> window(nseg);
  for (int k = 0; k < nseg; ++k)
    window[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * k / nseg));

  const int nf = nseg / 2 + 1;
  std::vector<double> pxx(nf, 0.0), pyy(nf, 0.0);
  std::vector<cd> pxy(nf, cd{0.0, 0.0});
  std::vector<cd> xs, ys;

  const int step = std::max(1, nseg / 2);
  for (int start = 0; start + nseg <= n; start += step) {
    segment_spectrum(s.subspan(start, nseg), window, xs);
    segment_spectrum(y.subspan(start, nseg), window, ys);
    for (int j = 0; j < nf; ++j) {
      pxx[j] += std::norm(xs[j]);
      pyy[j] += std::norm(ys[j]);
      pxy[j] += xs[j] * std::conj(ys[j]);
    }
    ++res.n_segments;
  }
  if (res.n_segments == 0) return res;

  res.freq.resize(nf);
  res.coherence.assign(nf, 0.0);
  res.phase.assign(nf, 0.0);
  res.tau.assign(nf, missing());
  for (int j = 0; j < nf; ++j) {
    res.freq[j] = static_cast<double>(j) / nseg;
    const double den = pxx[j] * pyy[j];
    res.coherence[j] = den > 0.0 ? std::norm(pxy[j]) / den : 0.0;
    res.phase[j] = std::atan2(pxy[j].imag(), pxy[j].real());
    if (j == 0) continue;
    const double f = res.freq[j];
    const double tau = res.phase[j] / (2.0 * std::numbers::pi * f);
    if (res.coherence[j] >= coherence_floor && std::abs(tau) < 1.0 / (2.0 * f))
      res.tau[j] = tau;
  }

  // Band assignment by period; DC excluded.
  auto band_of = [&](int j) -> BandSummary* {
    if (j == 0) return nullptr;
    const double period = 1.0 / res.freq[j];
    if (period < short_max) return &res.short_run;
    if (period <= long_min) return &res.mid_run;
    return &res.long_run;
  };

  double mid_mass = 0.0, total_mass = 0.0;
  for (int j = 1; j < nf; ++j) {
    BandSummary* band = band_of(j);
    band->mean_coherence += res.coherence[j];
    ++band->n_freqs;
    if (!is_missing(res.tau[j])) {
      band->mean_tau += res.tau[j];
      ++band->n_tau;
    }
    total_mass += res.coherence[j];
    if (band == &res.mid_run) mid_mass += res.coherence[j];
  }
  for (BandSummary* band : {&res.short_run, &res.mid_run, &res.long_run}) {
    band->mean_coherence = band->n_freqs > 0 ? band->mean_coherence / band->n_freqs : missing();
    band->mean_tau = band->n_tau > 0 ? band->mean_tau / band->n_tau : missing();
  }
  res.c_mid = total_mass > 0.0 ? mid_mass / total_mass : missing();
  return res;
}

}  // namespace sentio
