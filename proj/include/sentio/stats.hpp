#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace sentio {

// ---------------------------------------------------------------------------
// Elementary sample statistics. NaN entries are the caller's problem unless
// the function says otherwise.
// ---------------------------------------------------------------------------

double mean(std::span<const double> x);
double sample_std(std::span<const double> x);  // n-1 denominator; 0 for n < 2

// Pearson correlation; NaN when either side has zero variance or n < 2.
double pearson(std::span<const double> x, std::span<const double> y);

// Type-7 quantile (linear interpolation between order statistics).
// `values` need not be sorted; q in [0,1]. Throws on empty input.
double quantile(std::vector<double> values, double q);

// ---------------------------------------------------------------------------
// Distribution tails. Hand-evaluated incomplete gamma/beta, relative accuracy
// around 1e-12 on the tested range.
// ---------------------------------------------------------------------------

double regularized_gamma_q(double a, double x);  // upper tail
double regularized_beta(double x, double a, double b);
double chi_squared_sf(double x, double dof);
double f_distribution_sf(double f, double d1, double d2);
double normal_cdf(double z);

// ---------------------------------------------------------------------------
// Deterministic seed substreams. A master seed plus a stream name plus a
// counter yields an independent engine seed, so parallel work is
// order-independent.
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t mix_seed(std::uint64_t master, std::string_view stream, std::uint64_t counter = 0);

inline std::mt19937_64 make_rng(std::uint64_t master, std::string_view stream,
                                std::uint64_t counter = 0) {
  return std::mt19937_64(mix_seed(master, stream, counter));
}

}  // namespace sentio
