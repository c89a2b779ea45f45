#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "sentio/core.hpp"

namespace sentio {

// ---------------------------------------------------------------------------
// Per-article weights
// ---------------------------------------------------------------------------

enum class UncertaintyMode { none, entropy, top2_margin, polarity };
enum class RedundancyMode { none, dedup, corroborate };

// Exponential recency decay admits three equivalent entry forms; the form is
// kept so sweep manifests can report the parameter the way it was given.
enum class RecencyForm { gamma, lambda, tau, alpha };

struct RecencyConfig {
  bool enabled = false;
  RecencyForm form = RecencyForm::gamma;
  double value = 0.0;

  double rate_per_day() const;  // gamma: v, lambda: -ln v, tau: 1/v, alpha: -ln v
  void validate() const;
};

struct WeightConfig {
  UncertaintyMode uncertainty = UncertaintyMode::none;
  RedundancyMode redundancy = RedundancyMode::none;
  double dedup_alpha = 1.0;  // in [0,1]
  RecencyConfig recency;
  double similarity_threshold = 0.85;  // in (0,1)

  void validate() const;
};

std::string_view uncertainty_name(UncertaintyMode m);
std::string_view redundancy_name(RedundancyMode m);
std::string_view recency_form_name(RecencyForm f);

// Confidence weight in [0,1] derived from the classifier posterior.
double uncertainty_weight(const ProbabilityTriple& probs, UncertaintyMode mode);

// Group-size weight: dedup n^-alpha, corroborate 1|ln n. Throws on n < 1.
double redundancy_weight(int group_size, RedundancyMode mode, double alpha = 1.0);

// exp(-gamma * days before bin end). Throws if t is after bin_end.
double recency_weight(Instant t, Instant bin_end, double gamma_per_day);

// ---------------------------------------------------------------------------
// Near-duplicate grouping within one (entity, bin)
// ---------------------------------------------------------------------------

struct DuplicatePartition {
  std::vector<std::vector<std::size_t>> groups;  // ordered by smallest member
  std::vector<int> group_size_of;                // per input index
};

// Connected components of the "cosine similarity >= threshold" graph.
// Deterministic: groups sorted by least member, members ascending.
DuplicatePartition group_near_duplicates(const std::vector<std::vector<double>>& embeddings,
                                         double threshold);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Deterministic fallback embedder: signed feature hashing of character
// 3-grams, L2-normalized. Throws on input that produces a zero vector.
std::vector<double> hash_embedding(std::string_view text, std::size_t dim = 256);

// ---------------------------------------------------------------------------
// Bin reduction
// ---------------------------------------------------------------------------

struct AggregateOptions {
  bool embedding_fallback = true;
  std::size_t fallback_dim = 256;
  bool strict_bins = false;
};

struct AggregateDiagnostics {
  std::size_t zero_weight_bins = 0;   // nonempty bins whose weights all vanish
  std::size_t fallback_embeddings = 0;
  std::size_t rejected_articles = 0;  // out-of-horizon
};

// Weighted mean; NaN for an empty bin or a zero total weight.
double aggregate_bin(std::span<const double> scores, std::span<const double> weights);

enum class CategoryReducer { unweighted_mean, count_weighted_mean };

AggregatedSeries aggregate_global(std::span<const Article> articles, const GridSpec& grid,
                                  const WeightConfig& weights, const AggregateOptions& opts = {},
                                  AggregateDiagnostics* diag = nullptr);

// Builds one series per category with the same mechanics, then reduces across
// categories with non-missing values per bin. Counts stay the raw per-bin
// article totals across categories.
AggregatedSeries aggregate_local(std::span<const Article> articles, const GridSpec& grid,
                                 const WeightConfig& weights, CategoryReducer reducer,
                                 const AggregateOptions& opts = {},
                                 AggregateDiagnostics* diag = nullptr);

}  // namespace sentio
