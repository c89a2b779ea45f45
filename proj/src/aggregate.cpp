#include "sentio/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "sentio/stats.hpp"

namespace sentio {

double RecencyConfig::rate_per_day() const {
  if (!enabled) return 0.0;
  switch (form) {
    case RecencyForm::gamma: return value;
    case RecencyForm::lambda: return -std::log(value);
    case RecencyForm::tau: return 1.0 / value;
    case RecencyForm::alpha: return -std::log(value);
  }
  return 0.0;
}

void RecencyConfig::validate() const {
  if (!enabled) return;
  switch (form) {
    case RecencyForm::gamma:
      if (!(value >= 0.0)) throw std::invalid_argument("recency gamma must be >= 0");
      break;
    case RecencyForm::lambda:
    case RecencyForm::alpha:
      if (!(value > 0.0 && value <= 1.0))
        throw std::invalid_argument("recency lambda/alpha must lie in (0,1]");
      break;
    case RecencyForm::tau:
      if (!(value > 0.0)) throw std::invalid_argument("recency tau must be > 0");
      break;
  }
}

void WeightConfig::validate() const {
  if (!(dedup_alpha >= 0.0 && dedup_alpha <= 1.0))
    throw std::invalid_argument("dedup alpha must lie in [0,1]");
  if (!(similarity_threshold > 0.0 && similarity_threshold < 1.0))
    throw std::invalid_argument("similarity threshold must lie in (0,1)");
  recency.validate();
}

std::string_view uncertainty_name(UncertaintyMode m) {
  switch (m) {
    case UncertaintyMode::none: return "none";
    case UncertaintyMode::entropy: return "entropy";
    case UncertaintyMode::top2_margin: return "top2_margin";
    case UncertaintyMode::polarity: return "polarity";
  }
  return "?";
}

std::string_view redundancy_name(RedundancyMode m) {
  switch (m) {
    case RedundancyMode::none: return "none";
    case RedundancyMode::dedup: return "dedup";
    case RedundancyMode::corroborate: return "corroborate";
  }
  return "?";
}

std::string_view recency_form_name(RecencyForm f) {
  switch (f) {
    case RecencyForm::gamma: return "gamma";
    case RecencyForm::lambda: return "lambda";
    case RecencyForm::tau: return "tau";
    case RecencyForm::alpha: return "alpha";
  }
  return "?";
}

double uncertainty_weight(const ProbabilityTriple& p, UncertaintyMode mode) {
  switch (mode) {
    case UncertaintyMode::none:
      return 1.0;
    case UncertaintyMode::entropy: {
      double h = 0.0;
      for (double v : {p.p_pos, p.p_neg, p.p_neu})
        if (v > 0.0) h -= v * std::log(v);  // 0*log 0 := 0
      const double u = h / std::log(3.0);
      return std::clamp(1.0 - u, 0.0, 1.0);
    }
    case UncertaintyMode::top2_margin: {
      double a = p.p_pos, b = p.p_neg, c = p.p_neu;
      if (a < b) std::swap(a, b);
      if (b < c) std::swap(b, c);
      if (a < b) std::swap(a, b);
      return a - b;
    }
    case UncertaintyMode::polarity: {
      const double polar_mass = p.p_pos + p.p_neg;
      const double dominance = (p.p_pos - p.p_neg) * (p.p_pos - p.p_neg);
      const double u = polar_mass - dominance;
      return std::clamp(1.0 - u, 0.0, 1.0);
    }
  }
  return 1.0;
}

double redundancy_weight(int n, RedundancyMode mode, double alpha) {
  if (n < 1) throw std::invalid_argument("redundancy group size must be >= 1");
  switch (mode) {
    case RedundancyMode::none:
      return 1.0;
    case RedundancyMode::dedup:
      return std::pow(static_cast<double>(n), -alpha);
    case RedundancyMode::corroborate:
      return n == 1 ? 1.0 : std::log(static_cast<double>(n));
  }
  return 1.0;
}

double recency_weight(Instant t, Instant bin_end, double gamma_per_day) {
  if (t > bin_end) throw std::invalid_argument("recency weight: article after bin end");
  if (!(gamma_per_day >= 0.0)) throw std::invalid_argument("recency rate must be >= 0");
  const double days = static_cast<double>(bin_end - t) / static_cast<double>(kSecondsPerDay);
  return std::exp(-gamma_per_day * days);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("cosine similarity requires equal nonzero dimensions");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("cosine similarity of zero vector");
  return dot / std::sqrt(na * nb);
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // keep the smaller index as root
    parent[b] = a;
  }
};

}  // namespace

DuplicatePartition group_near_duplicates(const std::vector<std::vector<double>>& embeddings,
                                         double threshold) {
  const std::size_t n = embeddings.size();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (cosine_similarity(embeddings[i], embeddings[j]) >= threshold) uf.unite(i, j);

  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t i = 0; i < n; ++i) by_root[uf.find(i)].push_back(i);

  DuplicatePartition part;
  part.group_size_of.assign(n, 0);
  for (auto& [root, members] : by_root) {
    std::sort(members.begin(), members.end());
    for (std::size_t m : members) part.group_size_of[m] = static_cast<int>(members.size());
    part.groups.push_back(std::move(members));
  }
  return part;
}

std::vector<double> hash_embedding(std::string_view text, std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
  std::vector<double> v(dim, 0.0);
  if (text.size() >= 3) {
    for (std::size_t i = 0; i + 3 <= text.size(); ++i) {
      const std::uint64_t h = fnv1a64(text.substr(i, 3));
      const std::size_t slot = h % dim;
      const double sign = (h >> 63) ? 1.0 : -1.0;
      v[slot] += sign;
    }
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm <= 0.0)
    throw std::invalid_argument("fallback embedding degenerate for text '" + std::string(text) +
                                "'");
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

double aggregate_bin(std::span<const double> scores, std::span<const double> weights) {
  if (scores.size() != weights.size()) throw std::invalid_argument("score/weight size mismatch");
  if (scores.empty()) return missing();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("negative aggregation weight");
    num += weights[i] * scores[i];
    den += weights[i];
  }
  if (den <= 0.0) return missing();
  return num / den;
}

namespace {

// Weighted reduction of one bin's articles. `indices` selects the bin members
// (already filtered by category under local aggregation).
double reduce_bin(std::span<const Article> articles, const std::vector<std::size_t>& indices,
                  Instant bin_end, const WeightConfig& cfg, const AggregateOptions& opts,
                  AggregateDiagnostics* diag) {
  if (indices.empty()) return missing();

  std::vector<double> scores(indices.size()), weights(indices.size(), 1.0);
  for (std::size_t i = 0; i < indices.size(); ++i)
    scores[i] = score_article(articles[indices[i]].probs);

  if (cfg.uncertainty != UncertaintyMode::none)
    for (std::size_t i = 0; i < indices.size(); ++i)
      weights[i] *= uncertainty_weight(articles[indices[i]].probs, cfg.uncertainty);

  if (cfg.redundancy != RedundancyMode::none) {
    std::vector<std::vector<double>> embeddings(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const Article& a = articles[indices[i]];
      if (!a.embedding.empty()) {
        embeddings[i] = a.embedding;
      } else if (opts.embedding_fallback && !a.title.empty()) {
        embeddings[i] = hash_embedding(a.title, opts.fallback_dim);
        if (diag) ++diag->fallback_embeddings;
      } else {
        throw std::runtime_error("article without embedding (and no usable title fallback) "
                                 "under redundancy control");
      }
    }
    // Mixed provenance can yield unequal dimensions; that is a data error.
    const DuplicatePartition part = group_near_duplicates(embeddings, cfg.similarity_threshold);
    for (std::size_t i = 0; i < indices.size(); ++i)
      weights[i] *= redundancy_weight(part.group_size_of[i], cfg.redundancy, cfg.dedup_alpha);
  }

  if (cfg.recency.enabled) {
    const double gamma = cfg.recency.rate_per_day();
    for (std::size_t i = 0; i < indices.size(); ++i)
      weights[i] *= recency_weight(articles[indices[i]].timestamp, bin_end, gamma);
  }

  const double v = aggregate_bin(scores, weights);
  if (is_missing(v) && diag) ++diag->zero_weight_bins;
  return v;
}

}  // namespace

AggregatedSeries aggregate_global(std::span<const Article> articles, const GridSpec& grid,
                                  const WeightConfig& cfg, const AggregateOptions& opts,
                                  AggregateDiagnostics* diag) {
  cfg.validate();
  const BinAssignment bins = assign_bins(articles, grid, opts.strict_bins);
  if (diag) diag->rejected_articles += bins.n_rejected;

  GridSeries out;
  out.stage = Stage::aggregated;
  if (!articles.empty()) out.entity_id = articles[0].entity_id;
  out.counts = bins.counts;
  out.values.resize(grid.size(), missing());
  for (std::size_t k = 0; k < grid.size(); ++k)
    out.values[k] = reduce_bin(articles, bins.members[k], grid.bin_end(k), cfg, opts, diag);
  return AggregatedSeries{std::move(out)};
}

AggregatedSeries aggregate_local(std::span<const Article> articles, const GridSpec& grid,
                                 const WeightConfig& cfg, CategoryReducer reducer,
                                 const AggregateOptions& opts, AggregateDiagnostics* diag) {
  cfg.validate();
  const BinAssignment bins = assign_bins(articles, grid, opts.strict_bins);
  if (diag) diag->rejected_articles += bins.n_rejected;

  GridSeries out;
  out.stage = Stage::aggregated;
  if (!articles.empty()) out.entity_id = articles[0].entity_id;
  out.counts = bins.counts;
  out.values.resize(grid.size(), missing());

  for (std::size_t k = 0; k < grid.size(); ++k) {
    // Split the bin members by category, preserving input order.
    std::map<std::string_view, std::vector<std::size_t>> by_category;
    for (std::size_t idx : bins.members[k]) by_category[articles[idx].category].push_back(idx);

    double num = 0.0, den = 0.0;
    for (const auto& [cat, members] : by_category) {
      const double v = reduce_bin(articles, members, grid.bin_end(k), cfg, opts, diag);
      if (is_missing(v)) continue;
      const double w = reducer == CategoryReducer::count_weighted_mean
                           ? static_cast<double>(members.size())
                           : 1.0;
      num += w * v;
      den += w;
    }
    out.values[k] = den > 0.0 ? num / den : missing();
  }
  return AggregatedSeries{std::move(out)};
}

}  // namespace sentio
