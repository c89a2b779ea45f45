#pragma once

// Shared test utilities: series builders, independent oracles, and tiny
// simulators. Everything here is test-only and independent of the library
// implementation paths it checks.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "sentio/core.hpp"
#include "sentio/stats.hpp"

namespace sentio::test {

inline GridSeries make_series(std::vector<double> values, Stage stage = Stage::aggregated,
                              std::vector<int> counts = {}) {
  GridSeries s;
  s.entity_id = "T";
  if (counts.empty()) {
    counts.assign(values.size(), 0);
    for (std::size_t i = 0; i < values.size(); ++i) counts[i] = is_missing(values[i]) ? 0 : 1;
  }
  s.values = std::move(values);
  s.counts = std::move(counts);
  s.stage = stage;
  return s;
}

inline AggregatedSeries make_aggregated(std::vector<double> values, std::vector<int> counts = {}) {
  return AggregatedSeries{make_series(std::move(values), Stage::aggregated, std::move(counts))};
}

inline FilledSeries make_filled(std::vector<double> values, std::vector<int> counts = {}) {
  return FilledSeries{make_series(std::move(values), Stage::filled, std::move(counts))};
}

inline GridSeries truncate(const GridSeries& s, std::size_t k) {
  GridSeries out = s;
  out.values.resize(k);
  out.counts.resize(k);
  return out;
}

// Batch least-squares oracle for the scalar local-level model: prior
// x_1 ~ N(z_1, p1), transitions x_t - x_{t-1} ~ N(0, q), measurements
// z_t ~ N(x_t, r_t) for t >= 2. Returns the posterior mean of x_k given
// z_1..z_k, which the Kalman filter must reproduce.
inline double batch_local_level_mean(const std::vector<double>& z, const std::vector<double>& r,
                                     double q, double p1, std::size_t k) {
  const std::size_t n = k + 1;  // states x_0..x_k in 0-based indexing
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  a(0, 0) += 1.0 / p1;
  b(0) += z[0] / p1;
  for (std::size_t t = 1; t < n; ++t) {
    a(t, t) += 1.0 / q;
    a(t - 1, t - 1) += 1.0 / q;
    a(t, t - 1) -= 1.0 / q;
    a(t - 1, t) -= 1.0 / q;
    a(t, t) += 1.0 / r[t];
    b(t) += z[t] / r[t];
  }
  const Eigen::VectorXd x = a.ldlt().solve(b);
  return x(n - 1);
}

// Gaussian AR(1) path using the library's seeded substreams.
inline std::vector<double> simulate_ar1(double phi, double sigma, int n, std::uint64_t seed,
                                        const char* stream = "test-ar1") {
  auto rng = make_rng(seed, stream);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(n);
  double state = sigma / std::sqrt(std::max(1e-12, 1.0 - phi * phi)) * gauss(rng);
  for (int t = 0; t < n; ++t) {
    x[t] = state;
    state = phi * state + sigma * gauss(rng);
  }
  return x;
}

inline std::vector<double> simulate_white_noise(int n, std::uint64_t seed,
                                                const char* stream = "test-wn") {
  auto rng = make_rng(seed, stream);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(n);
  for (int t = 0; t < n; ++t) x[t] = gauss(rng);
  return x;
}

inline std::vector<double> simulate_random_walk(int n, std::uint64_t seed,
                                                const char* stream = "test-rw") {
  auto rng = make_rng(seed, stream);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(n);
  double level = 0.0;
  for (int t = 0; t < n; ++t) {
    level += gauss(rng);
    x[t] = level;
  }
  return x;
}

inline double lag1_autocorr(const std::vector<double>& x) {
  const double m = mean(x);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    den += (x[t] - m) * (x[t] - m);
    if (t > 0) num += (x[t] - m) * (x[t - 1] - m);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace sentio::test
