#include "sentio/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sentio/core.hpp"
#include "sentio/stats.hpp"

namespace sentio {

namespace {

bool standardize(std::span<const double> x, std::vector<double>& out) {
  const std::size_t n = x.size();
  if (n < 2) return false;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  if (!(ss > 0.0)) return false;
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - m) / sd;
  return true;
}

}  // namespace

DtwAlignment dtw_pearson(std::span<const double> x, std::span<const double> y, int band) {
  if (x.size() != y.size()) throw std::invalid_argument("dtw requires equal lengths");
  if (band < 0) throw std::invalid_argument("dtw band must be >= 0");

  DtwAlignment out;
  std::vector<double> xs, ys;
  if (!standardize(x, xs) || !standardize(y, ys)) return out;

  const int n = static_cast<int>(xs.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> d(static_cast<std::size_t>(n) * n, kInf);
  auto at = [&](int i, int j) -> double& { return d[static_cast<std::size_t>(i) * n + j]; };

  for (int i = 0; i < n; ++i) {
    const int j_lo = std::max(0, i - band);
    const int j_hi = std::min(n - 1, i + band);
    for (int j = j_lo; j <= j_hi; ++j) {
      const double cost = (xs[i] - ys[j]) * (xs[i] - ys[j]);
      if (i == 0 && j == 0) {
        at(i, j) = cost;
        continue;
      }
      double best = kInf;
      if (i > 0 && j > 0) best = std::min(best, at(i - 1, j - 1));
      if (i > 0) best = std::min(best, at(i - 1, j));
      if (j > 0) best = std::min(best, at(i, j - 1));
      at(i, j) = cost + best;
    }
  }

  // Backtrace, preferring diagonal, then up, then left on ties.
  std::vector<std::pair<int, int>> rev;
  int i = n - 1, j = n - 1;
  rev.emplace_back(i, j);
  while (i > 0 || j > 0) {
    double diag = (i > 0 && j > 0) ? at(i - 1, j - 1) : kInf;
    double up = i > 0 ? at(i - 1, j) : kInf;
    double left = j > 0 ? at(i, j - 1) : kInf;
    if (diag <= up && diag <= left) {
      --i;
      --j;
    } else if (up <= left) {
      --i;
    } else {
      --j;
    }
    rev.emplace_back(i, j);
  }
  out.path.assign(rev.rbegin(), rev.rend());
  out.cost = at(n - 1, n - 1);

  std::vector<double> px, py;
  px.reserve(out.path.size());
  py.reserve(out.path.size());
  for (auto [a, b] : out.path) {
    px.push_back(xs[a]);
    py.push_back(ys[b]);
  }
  out.pearson = pearson(px, py);
  out.defined = !is_missing(out.pearson);
  return out;
}

RollingDtwResult rolling_dtw(std::span<const double> s, std::span<const double> y, int window,
                             int step, int band, int n_perm, int block, std::uint64_t seed) {
  if (s.size() != y.size()) throw std::invalid_argument("dtw series length mismatch");
  if (window < 4 || step < 1 || n_perm < 1 || block < 1)
    throw std::invalid_argument("bad rolling dtw parameters");

  const int n = static_cast<int>(s.size());
  RollingDtwResult res;
  double r_sum = 0.0;
  int n_reject = 0;

  for (int start = 0; start + window <= n; start += step) {
    RollingDtwWindow w;
    w.start = start;

    bool complete = true;
    for (int k = start; k < start + window && complete; ++k)
      complete = !is_missing(s[k]) && !is_missing(y[k]);
    if (complete) {
      const auto sw = s.subspan(start, window);
      const auto yw = y.subspan(start, window);
      const DtwAlignment obs = dtw_pearson(sw, yw, band);
      if (obs.defined) {
        w.defined = true;
        w.r = obs.pearson;

        const int n_blocks = (window + block - 1) / block;
        std::vector<int> block_order(n_blocks);
        auto rng = make_rng(seed, "dtw-perm", static_cast<std::uint64_t>(start));
        std::vector<double> permuted(window);
        int exceed = 0;
        for (int rep = 0; rep < n_perm; ++rep) {
          for (int b = 0; b < n_blocks; ++b) block_order[b] = b;
          std::shuffle(block_order.begin(), block_order.end(), rng);
          int pos = 0;
          for (int b : block_order) {
            const int lo = b * block;
            const int hi = std::min(lo + block, window);
            for (int k = lo; k < hi; ++k) permuted[pos++] = yw[k];
          }
          const DtwAlignment perm = dtw_pearson(sw, permuted, band);
          if (perm.defined && std::abs(perm.pearson) >= std::abs(obs.pearson)) ++exceed;
        }
        w.p_perm = (1.0 + exceed) / (n_perm + 1.0);
        ++res.n_valid;
        r_sum += w.r;
        if (w.p_perm <= 0.05) ++n_reject;
      }
    }
    res.windows.push_back(w);
  }

  res.mean_r = res.n_valid > 0 ? r_sum / res.n_valid : missing();
  res.rejection_rate = res.n_valid > 0 ? static_cast<double>(n_reject) / res.n_valid : 0.0;
  return res;
}

}  // namespace sentio
