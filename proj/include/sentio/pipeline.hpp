#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentio/aggregate.hpp"
#include "sentio/consistency.hpp"
#include "sentio/core.hpp"
#include "sentio/evaluate.hpp"
#include "sentio/fill.hpp"
#include "sentio/smooth.hpp"
#include "sentio/synth.hpp"

namespace sentio {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class AggregationScope { global, local };
std::string_view scope_name(AggregationScope s);

struct GridConfig {
  GridFrequency frequency = GridFrequency::weekly;
  Weekday anchor = Weekday::friday;
  std::optional<Instant> start;  // derived from the data when absent
  std::optional<Instant> end;
};

struct PipelineConfig {
  AggregationScope scope = AggregationScope::global;
  CategoryReducer reducer = CategoryReducer::unweighted_mean;
  GridConfig grid;
  WeightConfig weights;
  FillConfig fill;
  SmootherConfig smoother;
  Stage output_stage = Stage::smoothed;
  AggregateOptions options;

  void validate() const;
};

// Canonical one-line rendering; equal configs render identically, so the
// FNV64 of this string doubles as the config hash.
std::string config_summary(const PipelineConfig& cfg);
std::uint64_t config_hash(const PipelineConfig& cfg);

// ---------------------------------------------------------------------------
// Staged execution
// ---------------------------------------------------------------------------

struct EntityStages {
  std::string entity_id;
  AggregatedSeries aggregated;
  FilledSeries filled;
  SmoothedSeries smoothed;
  AggregateDiagnostics diagnostics;
  bool ok = true;
  std::string error;  // per-entity failures isolate, they never abort the panel

  const GridSeries& at_stage(Stage s) const;
  int article_total() const;  // sum of bin counts
};

struct PanelResult {
  GridSpec grid;
  std::vector<EntityStages> entities;  // ordered by entity_id

  const EntityStages* find(std::string_view entity_id) const;
};

// Runs aggregation -> fill -> smoothing per entity, retaining all three
// stages. `fixed_grid` pins the grid (counterfactual harnesses must hold it
// constant across paired runs); otherwise grid extents come from the config
// or, failing that, from the data span.
PanelResult run_pipeline(const PipelineConfig& cfg, std::span<const Article> articles,
                         const GridSpec* fixed_grid = nullptr);

GridSpec resolve_grid(const PipelineConfig& cfg, std::span<const Article> articles);

// ---------------------------------------------------------------------------
// Label-free metric report
// ---------------------------------------------------------------------------

struct MetricColumn {
  std::string name;
  std::vector<double> values;  // aligned with entity_ids; NaN = excluded
  MetricSummary summary;
};

struct LabelFreeReport {
  std::vector<std::string> entity_ids;
  std::vector<MetricColumn> columns;
};

LabelFreeReport label_free_report(const PanelResult& panel);

// ---------------------------------------------------------------------------
// Strategy enumeration
// ---------------------------------------------------------------------------

struct SweepSpec {
  PipelineConfig base;
  std::vector<UncertaintyMode> uncertainty{UncertaintyMode::none};
  std::vector<std::pair<RedundancyMode, double>> redundancy{{RedundancyMode::none, 1.0}};
  std::vector<RecencyConfig> recency{RecencyConfig{}};
  std::vector<FillConfig> fills{FillConfig{}};
  std::vector<SmootherConfig> smoothers{SmootherConfig{}};
  std::vector<AggregationScope> scopes{AggregationScope::global};
  int display_base = 0;

  // Lexicographic over (uncertainty, redundancy, recency, fill, smoother,
  // scope), the last axis varying fastest; indices are gap-free.
  std::size_t size() const;
  PipelineConfig config_at(std::size_t index) const;
  std::string label(std::size_t index) const;  // "S_<index + display_base>"
  std::optional<std::size_t> parse_label(std::string_view label) const;
};

std::vector<std::pair<std::string, PipelineConfig>> enumerate_configs(const SweepSpec& sweep);

// ---------------------------------------------------------------------------
// Design study: one-factor-at-a-time comparisons against stage baselines
// ---------------------------------------------------------------------------

struct DesignVariant {
  std::string component;  // uncertainty | redundancy | recency | fill | smoother
  std::string method;
  bool is_baseline = false;
  PipelineConfig config;
};

struct DesignStudySpec {
  // Each component carries exactly one baseline entry.
  std::vector<DesignVariant> aggregation;
  std::vector<DesignVariant> fill;
  std::vector<DesignVariant> smoothing;
};

// Baselines: unweighted mean aggregation, constant fill, no smoothing.
DesignStudySpec default_design_study(const PipelineConfig& base);

struct DesignRow {
  std::string stage;      // aggregation | fill | smoothing
  std::string component;  // uncertainty | redundancy | recency | fill | smoother
  std::string method;
  std::string metric;  // tv | gap_drift | abs_lag | peak_rho
  bool is_baseline = false;
  MetricSummary absolute;
  // Summary-statistic deltas vs the stage baseline; zero on baseline rows.
  double d_median = 0, d_iqr = 0, d_mean = 0, d_std = 0, d_q10 = 0, d_q90 = 0;
};

std::vector<DesignRow> run_design_study(const DesignStudySpec& spec,
                                        std::span<const Article> articles);

// ---------------------------------------------------------------------------
// Consistency study
// ---------------------------------------------------------------------------

struct StudyParams {
  int ccf_max_lag = 4;
  int dtw_window = 52;
  int dtw_step = 4;
  int dtw_band = 8;
  int dtw_permutations = 500;
  int dtw_block = 8;
  int granger_window = 52;
  int granger_step = 4;
  int granger_lag = 2;
  int welch_segment = 52;
  double coherence_floor = 0.1;
  FisherWeights fisher = FisherWeights::count_squared;
  PriceTransform price_transform = PriceTransform::log_return;
  int price_window = 1;   // transform lookback
  int minmax_window = 13; // for the minmax transform
  int min_matched_obs = 30;
  int adf_max_lag = 4;
  std::uint64_t seed = 0;
};

using PricePanel = std::map<std::string, std::vector<double>>;  // per-entity closes on the grid

PricePanel align_prices(std::span<const PriceRow> rows, const GridSpec& grid);

// Per-entity diagnostics feeding one ConsistencyRow.
struct EntityConsistency {
  std::string entity_id;
  bool included = false;
  std::string exclusion_reason;
  std::vector<double> ccf_rho;  // per lag, -max..max
  int ccf_peak_lag = 0;
  double article_total = 0.0;
  int granger_significant = 0;
  int granger_valid = 0;
  double c_mid = 0.0;
  double dtw_mean_r = 0.0;
  bool dtw_defined = false;
  bool welch_defined = false;
};

EntityConsistency entity_consistency(std::span<const double> sentiment,
                                     std::span<const double> closes, double article_total,
                                     const StudyParams& params);

ConsistencyRow summarize_consistency(const std::string& config_id,
                                     std::span<const EntityConsistency> entities,
                                     const StudyParams& params);

// Runs every sweep configuration against the price rows (aligned internally
// to the sweep's grid); rows come back ranked by composite score (ties by
// label). Deterministic for a fixed (sweep, data, params) regardless of
// `jobs`.
std::vector<ConsistencyRow> run_consistency_study(const SweepSpec& sweep,
                                                  std::span<const Article> articles,
                                                  std::span<const PriceRow> price_rows,
                                                  const StudyParams& params, int jobs = 1);

}  // namespace sentio
