#pragma once

#include <cstddef>
#include <string_view>

#include "sentio/core.hpp"

namespace sentio {

enum class SmootherMethod {
  none,
  ewma,
  weighted_ewma,
  kalman,
  kalman_arctanh,
  kalman_count,
  kalman_arctanh_count,
  beta_binomial
};

std::string_view smoother_name(SmootherMethod m);

struct SmootherConfig {
  SmootherMethod method = SmootherMethod::none;
  double alpha = 0.3;     // ewma / weighted_ewma gain, (0,1]
  double q = 0.01;        // Kalman state drift variance, > 0
  double r = 0.25;        // fixed observation variance (kalman, kalman_arctanh), > 0
  double p1 = 1.0;        // diffuse prior variance, > 0
  double delta = 0.9;     // beta_binomial forgetting, (0,1]
  int t_floor = 1;        // effective count floor for count-aware variances
  double edge_eps = 1e-6; // clamp for |x| -> 1 in arctanh space

  void validate() const;  // throws std::invalid_argument before any data work
};

struct SmoothDiagnostics {
  std::size_t clamped_edges = 0;     // |x| >= 1 clamped for arctanh
  std::size_t floored_variance = 0;  // count-based R floored/capped
  std::size_t empty_posterior = 0;   // beta_binomial carried previous output
};

// Single-step recursions, exposed so tests can unroll them against oracles.
double ewma_step(double prev, double x, double alpha);

struct KalmanState {
  double mean = 0.0;
  double var = 1.0;
};
// One predict/update cycle of the scalar local-level filter.
KalmanState kalman_step(KalmanState state, double z, double q, double r_k);

struct BetaBinomialState {
  double a = 0.0;
  double b = 0.0;
};
BetaBinomialState beta_binomial_step(BetaBinomialState s, double x, double t_k, double delta);

// Applies the configured causal smoother. Missing bins produce missing
// outputs; filter state still advances through them (the prediction variance
// accumulates drift, the conjugate posterior keeps forgetting), so the
// recursion depends only on present and past bins.
SmoothedSeries smooth(const FilledSeries& input, const SmootherConfig& cfg,
                      SmoothDiagnostics* diag = nullptr);

}  // namespace sentio
