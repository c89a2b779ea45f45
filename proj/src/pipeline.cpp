#include "sentio/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

#include "sentio/arma.hpp"
#include "sentio/dtw.hpp"
#include "sentio/granger.hpp"
#include "sentio/spectral.hpp"
#include "sentio/stats.hpp"

namespace sentio {

std::string_view scope_name(AggregationScope s) {
  return s == AggregationScope::global ? "global" : "local";
}

void PipelineConfig::validate() const {
  weights.validate();
  fill.validate();
  smoother.validate();
  if (grid.start && grid.end && *grid.start >= *grid.end)
    throw std::invalid_argument("pipeline grid start must precede end");
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string config_summary(const PipelineConfig& c) {
  std::string s;
  s += "scope=";
  s += scope_name(c.scope);
  s += " reducer=";
  s += c.reducer == CategoryReducer::unweighted_mean ? "unweighted_mean" : "count_weighted_mean";
  s += " freq=";
  s += frequency_name(c.grid.frequency);
  s += " anchor=";
  s += weekday_name(c.grid.anchor);
  s += " start=" + (c.grid.start ? format_instant(*c.grid.start) : std::string("auto"));
  s += " end=" + (c.grid.end ? format_instant(*c.grid.end) : std::string("auto"));
  s += " unc=";
  s += uncertainty_name(c.weights.uncertainty);
  s += " red=";
  s += redundancy_name(c.weights.redundancy);
  s += " alpha=" + fmt(c.weights.dedup_alpha);
  s += " rec=";
  if (c.weights.recency.enabled) {
    s += recency_form_name(c.weights.recency.form);
    s += ":" + fmt(c.weights.recency.value);
  } else {
    s += "none";
  }
  s += " simthr=" + fmt(c.weights.similarity_threshold);
  s += " fill=";
  s += fill_rule_name(c.fill.rule);
  s += " H=" + std::to_string(c.fill.horizon);
  s += " smooth=";
  s += smoother_name(c.smoother.method);
  s += " a=" + fmt(c.smoother.alpha) + " q=" + fmt(c.smoother.q) + " r=" + fmt(c.smoother.r) +
       " p1=" + fmt(c.smoother.p1) + " delta=" + fmt(c.smoother.delta) +
       " tfloor=" + std::to_string(c.smoother.t_floor) + " eps=" + fmt(c.smoother.edge_eps);
  s += " out=";
  s += stage_name(c.output_stage);
  s += " fallback=" + std::to_string(c.options.embedding_fallback ? 1 : 0);
  s += " dim=" + std::to_string(c.options.fallback_dim);
  s += " strict=" + std::to_string(c.options.strict_bins ? 1 : 0);
  return s;
}

std::uint64_t config_hash(const PipelineConfig& c) { return fnv1a64(config_summary(c)); }

const GridSeries& EntityStages::at_stage(Stage s) const {
  switch (s) {
    case Stage::aggregated: return aggregated.series;
    case Stage::filled: return filled.series;
    case Stage::smoothed: return smoothed.series;
  }
  return smoothed.series;
}

int EntityStages::article_total() const {
  int total = 0;
  for (int c : aggregated.series.counts) total += c;
  return total;
}

const EntityStages* PanelResult::find(std::string_view entity_id) const {
  for (const auto& e : entities)
    if (e.entity_id == entity_id) return &e;
  return nullptr;
}

GridSpec resolve_grid(const PipelineConfig& cfg, std::span<const Article> articles) {
  Instant start, end;
  if (cfg.grid.start && cfg.grid.end) {
    start = *cfg.grid.start;
    end = *cfg.grid.end;
  } else {
    if (articles.empty()) throw std::runtime_error("cannot derive a grid from an empty panel");
    Instant lo = articles[0].timestamp, hi = articles[0].timestamp;
    for (const Article& a : articles) {
      lo = std::min(lo, a.timestamp);
      hi = std::max(hi, a.timestamp);
    }
    start = cfg.grid.start ? *cfg.grid.start
                           : floor_to_boundary(lo, cfg.grid.frequency, cfg.grid.anchor);
    end = cfg.grid.end ? *cfg.grid.end : next_boundary(hi, cfg.grid.frequency, cfg.grid.anchor);
  }
  return build_grid(start, end, cfg.grid.frequency, cfg.grid.anchor);
}

PanelResult run_pipeline(const PipelineConfig& cfg, std::span<const Article> articles,
                         const GridSpec* fixed_grid) {
  cfg.validate();
  PanelResult panel;
  panel.grid = fixed_grid ? *fixed_grid : resolve_grid(cfg, articles);

  std::map<std::string, std::vector<Article>> by_entity;
  for (const Article& a : articles) by_entity[a.entity_id].push_back(a);

  for (auto& [id, group] : by_entity) {
    EntityStages st;
    st.entity_id = id;
    try {
      st.aggregated =
          cfg.scope == AggregationScope::global
              ? aggregate_global(group, panel.grid, cfg.weights, cfg.options, &st.diagnostics)
              : aggregate_local(group, panel.grid, cfg.weights, cfg.reducer, cfg.options,
                                &st.diagnostics);
      st.aggregated.series.entity_id = id;
      st.filled = causal_fill(st.aggregated, cfg.fill);
      st.smoothed = smooth(st.filled, cfg.smoother);
    } catch (const std::exception& e) {
      st.ok = false;
      st.error = e.what();
    }
    panel.entities.push_back(std::move(st));
  }
  return panel;
}

LabelFreeReport label_free_report(const PanelResult& panel) {
  LabelFreeReport rep;
  const std::size_t n = panel.entities.size();
  std::vector<double> tv_a(n), tv_f(n), tv_s(n), r_fa(n), r_sf(n), r_sa(n), gap(n), rho(n), lag(n);
  for (std::size_t i = 0; i < n; ++i) {
    const EntityStages& e = panel.entities[i];
    rep.entity_ids.push_back(e.entity_id);
    if (!e.ok) {
      tv_a[i] = tv_f[i] = tv_s[i] = r_fa[i] = r_sf[i] = r_sa[i] = gap[i] = rho[i] = lag[i] =
          missing();
      continue;
    }
    tv_a[i] = total_variation(e.aggregated.series);
    tv_f[i] = total_variation(e.filled.series);
    tv_s[i] = total_variation(e.smoothed.series);
    const TvRatios r = tv_ratios(tv_a[i], tv_f[i], tv_s[i]);
    r_fa[i] = r.f_over_a;
    r_sf[i] = r.s_over_f;
    r_sa[i] = r.s_over_a;
    gap[i] = gap_drift(e.aggregated, e.filled);
    const LagProxy lp = lag_proxy(e.filled, e.smoothed);
    rho[i] = lp.defined ? lp.rho_star : missing();
    lag[i] = lp.defined ? static_cast<double>(lp.abs_lag) : missing();
  }

  auto push = [&](std::string name, std::vector<double> values) {
    MetricColumn col;
    col.name = std::move(name);
    bool any = false;
    for (double v : values) any = any || !is_missing(v);
    col.summary = any ? cross_section_summary(values) : MetricSummary{};
    if (!any) col.summary.n_excluded = static_cast<int>(values.size());
    col.values = std::move(values);
    rep.columns.push_back(std::move(col));
  };
  push("tv_aggregated", std::move(tv_a));
  push("tv_filled", std::move(tv_f));
  push("tv_smoothed", std::move(tv_s));
  push("tv_ratio_f_a", std::move(r_fa));
  push("tv_ratio_s_f", std::move(r_sf));
  push("tv_ratio_s_a", std::move(r_sa));
  push("gap_drift", std::move(gap));
  push("lag_rho", std::move(rho));
  push("lag_abs", std::move(lag));
  return rep;
}

// ---------------------------------------------------------------------------
// Sweep enumeration
// ---------------------------------------------------------------------------

std::size_t SweepSpec::size() const {
  return uncertainty.size() * redundancy.size() * recency.size() * fills.size() *
         smoothers.size() * scopes.size();
}

PipelineConfig SweepSpec::config_at(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("sweep index out of range");
  const std::size_t n_scope = scopes.size();
  const std::size_t n_smooth = smoothers.size();
  const std::size_t n_fill = fills.size();
  const std::size_t n_rec = recency.size();
  const std::size_t n_red = redundancy.size();

  const std::size_t i_scope = index % n_scope;
  index /= n_scope;
  const std::size_t i_smooth = index % n_smooth;
  index /= n_smooth;
  const std::size_t i_fill = index % n_fill;
  index /= n_fill;
  const std::size_t i_rec = index % n_rec;
  index /= n_rec;
  const std::size_t i_red = index % n_red;
  index /= n_red;
  const std::size_t i_unc = index;

  PipelineConfig cfg = base;
  cfg.weights.uncertainty = uncertainty[i_unc];
  cfg.weights.redundancy = redundancy[i_red].first;
  cfg.weights.dedup_alpha = redundancy[i_red].second;
  cfg.weights.recency = recency[i_rec];
  cfg.fill = fills[i_fill];
  cfg.smoother = smoothers[i_smooth];
  cfg.scope = scopes[i_scope];
  return cfg;
}

std::string SweepSpec::label(std::size_t index) const {
  return "S_" + std::to_string(index + static_cast<std::size_t>(display_base));
}

std::optional<std::size_t> SweepSpec::parse_label(std::string_view label) const {
  if (label.size() < 3 || label.substr(0, 2) != "S_") return std::nullopt;
  std::size_t value = 0;
  for (char ch : label.substr(2)) {
    if (ch < '0' || ch > '9') return std::nullopt;
    value = value * 10 + static_cast<std::size_t>(ch - '0');
  }
  if (value < static_cast<std::size_t>(display_base)) return std::nullopt;
  value -= static_cast<std::size_t>(display_base);
  if (value >= size()) return std::nullopt;
  return value;
}

std::vector<std::pair<std::string, PipelineConfig>> enumerate_configs(const SweepSpec& sweep) {
  std::vector<std::pair<std::string, PipelineConfig>> out;
  out.reserve(sweep.size());
  for (std::size_t i = 0; i < sweep.size(); ++i)
    out.emplace_back(sweep.label(i), sweep.config_at(i));
  return out;
}

// ---------------------------------------------------------------------------
// Design study
// ---------------------------------------------------------------------------

DesignStudySpec default_design_study(const PipelineConfig& base) {
  DesignStudySpec spec;
  PipelineConfig neutral = base;
  neutral.weights.uncertainty = UncertaintyMode::none;
  neutral.weights.redundancy = RedundancyMode::none;
  neutral.weights.recency = RecencyConfig{};
  neutral.fill = FillConfig{FillRule::constant, 1};
  neutral.smoother = SmootherConfig{};
  neutral.smoother.method = SmootherMethod::none;

  auto with_weights = [&](auto mutate) {
    PipelineConfig c = neutral;
    mutate(c.weights);
    return c;
  };

  spec.aggregation.push_back({"uncertainty", "base", true, neutral});
  spec.aggregation.push_back({"uncertainty", "entropy", false, with_weights([](WeightConfig& w) {
                                w.uncertainty = UncertaintyMode::entropy;
                              })});
  spec.aggregation.push_back({"uncertainty", "polarity", false, with_weights([](WeightConfig& w) {
                                w.uncertainty = UncertaintyMode::polarity;
                              })});
  spec.aggregation.push_back({"uncertainty", "top2_margin", false,
                              with_weights([](WeightConfig& w) {
                                w.uncertainty = UncertaintyMode::top2_margin;
                              })});

  spec.aggregation.push_back({"redundancy", "base", true, neutral});
  spec.aggregation.push_back({"redundancy", "dedup", false, with_weights([](WeightConfig& w) {
                                w.redundancy = RedundancyMode::dedup;
                                w.dedup_alpha = 1.0;
                              })});
  spec.aggregation.push_back({"redundancy", "corroborate", false,
                              with_weights([](WeightConfig& w) {
                                w.redundancy = RedundancyMode::corroborate;
                              })});

  spec.aggregation.push_back({"recency", "base", true, neutral});
  spec.aggregation.push_back({"recency", "lambda_0.95", false, with_weights([](WeightConfig& w) {
                                w.recency = {true, RecencyForm::lambda, 0.95};
                              })});
  spec.aggregation.push_back({"recency", "tau_5", false, with_weights([](WeightConfig& w) {
                                w.recency = {true, RecencyForm::tau, 5.0};
                              })});
  spec.aggregation.push_back({"recency", "alpha_0.95", false, with_weights([](WeightConfig& w) {
                                w.recency = {true, RecencyForm::alpha, 0.95};
                              })});

  spec.fill.push_back({"fill", "constant", true, neutral});
  for (int h : {5, 10, 30, 60, 90}) {
    PipelineConfig c = neutral;
    c.fill = FillConfig{FillRule::linear_decay, h};
    spec.fill.push_back({"fill", "linear_decay_H" + std::to_string(h), false, c});
  }

  auto with_smoother = [&](SmootherMethod m) {
    PipelineConfig c = neutral;
    c.smoother = base.smoother;
    c.smoother.method = m;
    return c;
  };
  spec.smoothing.push_back({"smoother", "none", true, neutral});
  for (SmootherMethod m :
       {SmootherMethod::ewma, SmootherMethod::weighted_ewma, SmootherMethod::kalman,
        SmootherMethod::kalman_arctanh, SmootherMethod::kalman_count,
        SmootherMethod::kalman_arctanh_count, SmootherMethod::beta_binomial})
    spec.smoothing.push_back({"smoother", std::string(smoother_name(m)), false, with_smoother(m)});
  return spec;
}

namespace {

// Per-entity metric vector for one design variant.
std::vector<double> design_metric(const PanelResult& panel, const std::string& metric) {
  std::vector<double> out;
  for (const EntityStages& e : panel.entities) {
    if (!e.ok) {
      out.push_back(missing());
      continue;
    }
    if (metric == "tv_aggregated") {
      out.push_back(total_variation(e.aggregated.series));
    } else if (metric == "tv_filled") {
      out.push_back(total_variation(e.filled.series));
    } else if (metric == "tv_smoothed") {
      out.push_back(total_variation(e.smoothed.series));
    } else if (metric == "gap_drift") {
      out.push_back(gap_drift(e.aggregated, e.filled));
    } else if (metric == "abs_lag") {
      const LagProxy lp = lag_proxy(e.filled, e.smoothed);
      out.push_back(lp.defined ? static_cast<double>(lp.abs_lag) : missing());
    } else if (metric == "peak_rho") {
      const LagProxy lp = lag_proxy(e.filled, e.smoothed);
      out.push_back(lp.defined ? lp.rho_star : missing());
    } else {
      out.push_back(missing());
    }
  }
  return out;
}

DesignRow make_design_row(const std::string& stage, const DesignVariant& variant,
                          const std::string& metric, const MetricSummary& absolute,
                          const MetricSummary* baseline) {
  DesignRow row;
  row.stage = stage;
  row.component = variant.component;
  row.method = variant.method;
  row.metric = metric;
  row.is_baseline = variant.is_baseline;
  row.absolute = absolute;
  if (baseline && !variant.is_baseline) {
    row.d_median = absolute.median - baseline->median;
    row.d_iqr = absolute.iqr - baseline->iqr;
    row.d_mean = absolute.mean - baseline->mean;
    row.d_std = absolute.std - baseline->std;
    row.d_q10 = absolute.q10 - baseline->q10;
    row.d_q90 = absolute.q90 - baseline->q90;
  }
  return row;
}

}  // namespace

std::vector<DesignRow> run_design_study(const DesignStudySpec& spec,
                                        std::span<const Article> articles) {
  std::vector<DesignRow> rows;

  auto run_stage = [&](const std::vector<DesignVariant>& variants, const std::string& stage,
                       const std::vector<std::string>& metrics) {
    // component -> metric -> baseline summary
    std::map<std::string, std::map<std::string, MetricSummary>> baselines;
    std::vector<std::pair<const DesignVariant*, std::map<std::string, MetricSummary>>> computed;
    for (const DesignVariant& v : variants) {
      const PanelResult panel = run_pipeline(v.config, articles);
      std::map<std::string, MetricSummary> summaries;
      for (const std::string& m : metrics) {
        const std::vector<double> values = design_metric(panel, m);
        bool any = false;
        for (double x : values) any = any || !is_missing(x);
        summaries[m] = any ? cross_section_summary(values) : MetricSummary{};
      }
      if (v.is_baseline) baselines[v.component] = summaries;
      computed.emplace_back(&v, std::move(summaries));
    }
    for (auto& [v, summaries] : computed) {
      const auto base_it = baselines.find(v->component);
      for (const std::string& m : metrics) {
        const MetricSummary* base_summary =
            base_it != baselines.end() ? &base_it->second.at(m) : nullptr;
        rows.push_back(make_design_row(stage, *v, m, summaries.at(m), base_summary));
      }
    }
  };

  run_stage(spec.aggregation, "aggregation", {"tv_aggregated"});
  run_stage(spec.fill, "fill", {"tv_filled", "gap_drift"});
  run_stage(spec.smoothing, "smoothing", {"tv_smoothed", "abs_lag", "peak_rho"});
  return rows;
}

// ---------------------------------------------------------------------------
// Consistency study
// ---------------------------------------------------------------------------

PricePanel align_prices(std::span<const PriceRow> rows, const GridSpec& grid) {
  PricePanel panel;
  // Last dated close within each bin wins.
  std::map<std::string, std::vector<Instant>> dates;
  for (const PriceRow& r : rows) {
    auto k = grid.bin_of(r.date);
    if (!k) continue;
    auto& closes = panel[r.entity_id];
    auto& when = dates[r.entity_id];
    if (closes.empty()) {
      closes.assign(grid.size(), missing());
      when.assign(grid.size(), std::numeric_limits<Instant>::min());
    }
    if (r.date >= when[*k]) {
      when[*k] = r.date;
      closes[*k] = r.close;
    }
  }
  return panel;
}

EntityConsistency entity_consistency(std::span<const double> sentiment,
                                     std::span<const double> closes, double article_total,
                                     const StudyParams& params) {
  EntityConsistency out;
  out.article_total = article_total;
  if (sentiment.size() != closes.size())
    throw std::invalid_argument("sentiment/price grids differ");

  // Price representation on the grid.
  std::vector<double> transformed =
      params.price_transform == PriceTransform::log_return
          ? rolling_log_return(closes, params.price_window)
          : rolling_minmax(closes, params.minmax_window);

  // Matched samples: bins where both sides are present.
  std::vector<double> s, y;
  for (std::size_t k = 0; k < sentiment.size(); ++k) {
    if (is_missing(sentiment[k]) || is_missing(transformed[k])) continue;
    s.push_back(sentiment[k]);
    y.push_back(transformed[k]);
  }
  if (static_cast<int>(s.size()) < params.min_matched_obs) {
    out.exclusion_reason = "insufficient matched observations";
    return out;
  }

  // Stationarity safeguard; differencing shortens by one, so align tails.
  std::vector<double> s_stat = ensure_stationary(s, params.adf_max_lag);
  std::vector<double> y_stat = ensure_stationary(y, params.adf_max_lag);
  const std::size_t len = std::min(s_stat.size(), y_stat.size());
  if (static_cast<int>(len) < params.min_matched_obs) {
    out.exclusion_reason = "too short after differencing";
    return out;
  }
  s_stat.erase(s_stat.begin(), s_stat.end() - len);
  y_stat.erase(y_stat.begin(), y_stat.end() - len);

  // Matched-order prewhitening, then the residual cross-correlation.
  ArmaSelection sel;
  try {
    sel = fit_arma_aic(s_stat);
  } catch (const std::exception&) {
    out.exclusion_reason = "arma selection failed";
    return out;
  }
  const ArmaFit y_fit = fit_arma_css(y_stat, sel.best.order);
  const CcfResult ccf =
      prewhitened_ccf(sel.best.residuals, y_fit.residuals, params.ccf_max_lag);
  if (!ccf.defined) {
    out.exclusion_reason = "degenerate residuals";
    return out;
  }
  out.included = true;
  out.ccf_rho = ccf.rho;
  out.ccf_peak_lag = ccf.peak_lag;

  const GrangerResult granger = rolling_granger(s_stat, y_stat, params.granger_window,
                                                params.granger_step, params.granger_lag);
  out.granger_significant = granger.n_significant_sy;
  out.granger_valid = granger.n_valid;

  const WelchResult welch =
      welch_coherence(s_stat, y_stat, params.welch_segment, params.coherence_floor);
  out.welch_defined = welch.n_segments > 0 && !is_missing(welch.c_mid);
  out.c_mid = out.welch_defined ? welch.c_mid : 0.0;

  const RollingDtwResult dtw =
      rolling_dtw(s_stat, y_stat, params.dtw_window, params.dtw_step, params.dtw_band,
                  params.dtw_permutations, params.dtw_block, params.seed);
  out.dtw_defined = dtw.n_valid > 0;
  out.dtw_mean_r = out.dtw_defined ? dtw.mean_r : 0.0;
  return out;
}

ConsistencyRow summarize_consistency(const std::string& config_id,
                                     std::span<const EntityConsistency> entities,
                                     const StudyParams& params) {
  ConsistencyRow row;
  row.config_id = config_id;

  std::vector<const EntityConsistency*> included;
  for (const auto& e : entities)
    if (e.included) included.push_back(&e);
  row.n_entities = static_cast<int>(included.size());
  if (included.empty()) return row;

  // Fisher-aggregate the CCF lag profile across entities, then find the peak.
  const int n_lags = 2 * params.ccf_max_lag + 1;
  std::vector<double> rho_bar(n_lags, 0.0);
  std::vector<double> counts;
  for (const auto* e : included) counts.push_back(e->article_total);
  for (int i = 0; i < n_lags; ++i) {
    std::vector<double> rhos;
    for (const auto* e : included) rhos.push_back(e->ccf_rho[i]);
    rho_bar[i] = fisher_aggregate(rhos, params.fisher, counts);
  }
  bool first = true;
  auto consider = [&](int lag) {
    const double v = rho_bar[lag + params.ccf_max_lag];
    if (first || v > row.ccf_rho) {
      row.ccf_rho = v;
      row.ccf_lag = lag;
      first = false;
    }
  };
  consider(0);
  for (int l = 1; l <= params.ccf_max_lag; ++l) {
    consider(-l);
    consider(l);
  }

  long total_valid = 0, total_significant = 0;
  for (const auto* e : included) {
    total_valid += e->granger_valid;
    total_significant += e->granger_significant;
  }
  row.granger_sp_pct =
      total_valid > 0 ? 100.0 * static_cast<double>(total_significant) / total_valid : 0.0;

  std::vector<double> mids;
  for (const auto* e : included)
    if (e->welch_defined) mids.push_back(e->c_mid);
  row.mid_coh = mids.empty() ? 0.0 : mean(mids);

  std::vector<double> dtw_rs, dtw_counts;
  for (const auto* e : included)
    if (e->dtw_defined) {
      dtw_rs.push_back(e->dtw_mean_r);
      dtw_counts.push_back(e->article_total);
    }
  row.dtw_mean = dtw_rs.empty() ? 0.0 : fisher_aggregate(dtw_rs, params.fisher, dtw_counts);
  return row;
}

std::vector<ConsistencyRow> run_consistency_study(const SweepSpec& sweep,
                                                  std::span<const Article> articles,
                                                  std::span<const PriceRow> price_rows,
                                                  const StudyParams& params, int jobs) {
  const GridSpec grid = resolve_grid(sweep.base, articles);
  const PricePanel prices = align_prices(price_rows, grid);
  const auto configs = enumerate_configs(sweep);
  std::vector<ConsistencyRow> rows(configs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      const auto& [label, cfg] = configs[i];
      const PanelResult panel = run_pipeline(cfg, articles, &grid);
      std::vector<EntityConsistency> per_entity;
      for (const EntityStages& e : panel.entities) {
        if (!e.ok) continue;
        const auto it = prices.find(e.entity_id);
        EntityConsistency ec;
        if (it == prices.end()) {
          ec.entity_id = e.entity_id;
          ec.exclusion_reason = "no price series";
        } else {
          StudyParams p = params;
          p.seed = mix_seed(params.seed, e.entity_id);
          ec = entity_consistency(e.at_stage(cfg.output_stage).values, it->second,
                                  e.article_total(), p);
          ec.entity_id = e.entity_id;
        }
        per_entity.push_back(std::move(ec));
      }
      rows[i] = summarize_consistency(label, per_entity, params);
    }
  };

  const int n_threads = std::max(1, jobs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  composite_score(rows);
  std::sort(rows.begin(), rows.end(), [](const ConsistencyRow& a, const ConsistencyRow& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.config_id < b.config_id;
  });
  return rows;
}

}  // namespace sentio
