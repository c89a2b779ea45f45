#include "sentio/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sentio {

namespace {
constexpr double kVarianceFloor = 1e-12;
constexpr double kVarianceCap = 1e12;
}

std::string_view smoother_name(SmootherMethod m) {
  switch (m) {
    case SmootherMethod::none: return "none";
    case SmootherMethod::ewma: return "ewma";
    case SmootherMethod::weighted_ewma: return "weighted_ewma";
    case SmootherMethod::kalman: return "kalman";
    case SmootherMethod::kalman_arctanh: return "kalman_arctanh";
    case SmootherMethod::kalman_count: return "kalman_count";
    case SmootherMethod::kalman_arctanh_count: return "kalman_arctanh_count";
    case SmootherMethod::beta_binomial: return "beta_binomial";
  }
  return "?";
}

void SmootherConfig::validate() const {
  switch (method) {
    case SmootherMethod::none:
      return;
    case SmootherMethod::ewma:
    case SmootherMethod::weighted_ewma:
      if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("ewma alpha must lie in (0,1]");
      return;
    case SmootherMethod::kalman:
    case SmootherMethod::kalman_arctanh:
      if (!(q > 0.0)) throw std::invalid_argument("kalman q must be > 0");
      if (!(r > 0.0)) throw std::invalid_argument("kalman observation variance must be > 0");
      if (!(p1 > 0.0)) throw std::invalid_argument("kalman prior variance must be > 0");
      return;
    case SmootherMethod::kalman_count:
    case SmootherMethod::kalman_arctanh_count:
      if (!(q > 0.0)) throw std::invalid_argument("kalman q must be > 0");
      if (!(p1 > 0.0)) throw std::invalid_argument("kalman prior variance must be > 0");
      if (t_floor < 1) throw std::invalid_argument("count floor must be >= 1");
      if (!(edge_eps > 0.0 && edge_eps < 1.0))
        throw std::invalid_argument("edge epsilon must lie in (0,1)");
      return;
    case SmootherMethod::beta_binomial:
      if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("beta_binomial delta must lie in (0,1]");
      return;
  }
}

double ewma_step(double prev, double x, double alpha) { return alpha * x + (1.0 - alpha) * prev; }

KalmanState kalman_step(KalmanState s, double z, double q, double r_k) {
  if (!(r_k > 0.0)) throw std::invalid_argument("kalman step needs positive observation variance");
  const double p_pred = s.var + q;
  const double gain = p_pred / (p_pred + r_k);
  KalmanState out;
  out.mean = s.mean + gain * (z - s.mean);
  out.var = (1.0 - gain) * p_pred;
  if (out.var < kVarianceFloor) out.var = kVarianceFloor;
  return out;
}

BetaBinomialState beta_binomial_step(BetaBinomialState s, double x, double t_k, double delta) {
  if (t_k < 0.0) throw std::invalid_argument("beta_binomial count must be >= 0");
  const double p = (x + 1.0) / 2.0;
  BetaBinomialState out;
  out.a = delta * s.a + p * t_k;
  out.b = delta * s.b + (1.0 - p) * t_k;
  return out;
}

namespace {

struct SmootherState {
  bool initialized = false;
  double ewma = 0.0;
  KalmanState kalman;
  BetaBinomialState beta;
  double last_output = 0.0;
};

double clamp_edge(double x, double eps, SmoothDiagnostics* diag) {
  if (x >= 1.0 - eps) {
    if (diag && x >= 1.0) ++diag->clamped_edges;
    return 1.0 - eps;
  }
  if (x <= -1.0 + eps) {
    if (diag && x <= -1.0) ++diag->clamped_edges;
    return -1.0 + eps;
  }
  return x;
}

}  // namespace

SmoothedSeries smooth(const FilledSeries& input, const SmootherConfig& cfg,
                      SmoothDiagnostics* diag) {
  cfg.validate();
  const GridSeries& in = input.series;
  if (!in.counts.empty() && in.counts.size() != in.values.size())
    throw std::invalid_argument("counts/values length mismatch");

  GridSeries out = in;
  out.stage = Stage::smoothed;
  if (cfg.method == SmootherMethod::none) return SmoothedSeries{std::move(out)};

  SmootherState st;

  for (std::size_t k = 0; k < in.values.size(); ++k) {
    const double x = in.values[k];
    const double t_k = in.counts.empty() ? 1.0 : static_cast<double>(in.counts[k]);

    if (is_missing(x)) {
      out.values[k] = missing();
      if (st.initialized) {
        // Time still advances: drift variance accumulates, forgetting applies.
        switch (cfg.method) {
          case SmootherMethod::kalman:
          case SmootherMethod::kalman_arctanh:
          case SmootherMethod::kalman_count:
          case SmootherMethod::kalman_arctanh_count:
            st.kalman.var += cfg.q;
            break;
          case SmootherMethod::beta_binomial:
            st.beta.a *= cfg.delta;
            st.beta.b *= cfg.delta;
            break;
          default:
            break;
        }
      }
      continue;
    }

    if (!st.initialized) {
      st.initialized = true;
      switch (cfg.method) {
        case SmootherMethod::ewma:
        case SmootherMethod::weighted_ewma:
          st.ewma = x;
          out.values[k] = x;
          break;
        case SmootherMethod::kalman:
        case SmootherMethod::kalman_count:
          st.kalman = {x, cfg.p1};
          out.values[k] = x;
          break;
        case SmootherMethod::kalman_arctanh:
        case SmootherMethod::kalman_arctanh_count: {
          const double z = std::atanh(clamp_edge(x, cfg.edge_eps, diag));
          st.kalman = {z, cfg.p1};
          out.values[k] = std::tanh(z);
          break;
        }
        case SmootherMethod::beta_binomial: {
          st.beta = beta_binomial_step({0.0, 0.0}, x, std::max(t_k, 1.0), 1.0);
          out.values[k] = 2.0 * st.beta.a / (st.beta.a + st.beta.b) - 1.0;
          break;
        }
        default:
          break;
      }
      st.last_output = out.values[k];
      continue;
    }

    switch (cfg.method) {
      case SmootherMethod::ewma:
        st.ewma = ewma_step(st.ewma, x, cfg.alpha);
        out.values[k] = st.ewma;
        break;
      case SmootherMethod::weighted_ewma: {
        // Per-step gain grows with coverage and reduces to plain EWMA at t=1.
        const double a_k = cfg.alpha * t_k / (cfg.alpha * t_k + (1.0 - cfg.alpha));
        st.ewma = ewma_step(st.ewma, x, a_k);
        out.values[k] = st.ewma;
        break;
      }
      case SmootherMethod::kalman:
        st.kalman = kalman_step(st.kalman, x, cfg.q, cfg.r);
        out.values[k] = st.kalman.mean;
        break;
      case SmootherMethod::kalman_arctanh: {
        const double z = std::atanh(clamp_edge(x, cfg.edge_eps, diag));
        st.kalman = kalman_step(st.kalman, z, cfg.q, cfg.r);
        out.values[k] = std::tanh(st.kalman.mean);
        break;
      }
      case SmootherMethod::kalman_count: {
        const double t_eff = std::max(t_k, static_cast<double>(cfg.t_floor));
        double r_k = (1.0 - x * x) / t_eff;
        if (r_k < kVarianceFloor) {
          r_k = kVarianceFloor;  // an exactly saturated score has zero nominal variance
          if (diag) ++diag->floored_variance;
        }
        st.kalman = kalman_step(st.kalman, x, cfg.q, r_k);
        out.values[k] = st.kalman.mean;
        break;
      }
      case SmootherMethod::kalman_arctanh_count: {
        const double xc = clamp_edge(x, cfg.edge_eps, diag);
        const double t_eff = std::max(t_k, static_cast<double>(cfg.t_floor));
        double r_k = 1.0 / (t_eff * (1.0 - xc * xc));
        if (r_k > kVarianceCap) {
          r_k = kVarianceCap;
          if (diag) ++diag->floored_variance;
        }
        st.kalman = kalman_step(st.kalman, std::atanh(xc), cfg.q, r_k);
        out.values[k] = std::tanh(st.kalman.mean);
        break;
      }
      case SmootherMethod::beta_binomial: {
        st.beta = beta_binomial_step(st.beta, x, t_k, cfg.delta);
        const double total = st.beta.a + st.beta.b;
        if (total <= 0.0) {
          out.values[k] = st.last_output;
          if (diag) ++diag->empty_posterior;
        } else {
          out.values[k] = 2.0 * st.beta.a / total - 1.0;
        }
        break;
      }
      default:
        break;
    }
    st.last_output = out.values[k];
  }
  return SmoothedSeries{std::move(out)};
}

}  // namespace sentio
