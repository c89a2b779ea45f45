#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sentio/consistency.hpp"
#include "sentio/core.hpp"
#include "sentio/pipeline.hpp"
#include "sentio/synth.hpp"

namespace sentio {

// Input errors carry the 1-based line number of the offending record.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : std::runtime_error(message + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Line-delimited JSON with fields entity_id, ts, p_pos, p_neg, p_neu,
// category, optional embedding, optional title. Blank lines are skipped.
std::vector<Article> load_articles_jsonl(const std::filesystem::path& path);

// CSV variant without embeddings: header
// entity_id,ts,p_pos,p_neg,p_neu,category[,title].
std::vector<Article> load_articles_csv(const std::filesystem::path& path);

// Dispatch on the extension (.jsonl/.ndjson vs .csv).
std::vector<Article> load_articles(const std::filesystem::path& path);

// Prices CSV: entity_id,date,close.
std::vector<PriceRow> load_prices_csv(const std::filesystem::path& path);

void write_articles_jsonl(const std::filesystem::path& path, std::span<const Article> articles);
void write_prices_csv(const std::filesystem::path& path, std::span<const PriceRow> prices);

// Per-entity staged series CSV: bin,start,end,count,aggregated,filled,smoothed.
void write_series_csv(const std::filesystem::path& path, const GridSpec& grid,
                      const EntityStages& stages);

// Label-free metric report as JSON and as an aligned text table.
void write_metrics_json(const std::filesystem::path& path, const LabelFreeReport& report);
std::string render_metrics_table(const LabelFreeReport& report);

// Sweep manifest: config_id plus the full canonical configuration per row.
void write_manifest_csv(const std::filesystem::path& path, const SweepSpec& sweep);

// Fixed column order: config_id,n_entities,ccf_lag,ccf_rho,granger_sp_pct,
// mid_coh,dtw_mean,score.
void write_consistency_csv(const std::filesystem::path& path,
                           std::span<const ConsistencyRow> rows);

std::string render_design_table(std::span<const DesignRow> rows);
void write_design_csv(const std::filesystem::path& path, std::span<const DesignRow> rows);

// Round-trip decimal rendering ("NA" for missing); used by every CSV writer
// so reruns are byte-identical.
std::string format_value(double v);

// FNV-1a digest of a file's bytes, for run manifests.
std::uint64_t file_digest(const std::filesystem::path& path);

}  // namespace sentio
