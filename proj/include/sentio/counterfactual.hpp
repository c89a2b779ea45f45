#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sentio/core.hpp"
#include "sentio/evaluate.hpp"
#include "sentio/pipeline.hpp"

namespace sentio {

// ---------------------------------------------------------------------------
// Impulse causality test
// ---------------------------------------------------------------------------

enum class ImpulseScheme { additive_existing, synthetic_observation };

struct ImpulseSpec {
  ImpulseScheme scheme = ImpulseScheme::synthetic_observation;
  std::size_t k0 = 0;        // grid bin receiving the impulse
  double delta = 0.8;        // impulse magnitude, clipped into [-1, 1]
  double tolerance = 1e-9;   // pass threshold on the pre-impulse deviation
};

struct ImpulseEntityResult {
  std::string entity_id;
  double d_pre = 0.0;  // +inf flags a missingness flip before k0
  bool pass = false;
  bool skipped = false;  // additive scheme with an empty impulse bin
};

struct ImpulseReport {
  std::vector<ImpulseEntityResult> entities;
  MetricSummary d_pre_summary;
  double pass_rate = 0.0;  // over non-skipped entities
  bool all_pass = false;
};

// A runner maps an article set to a panel on a fixed grid; injecting a
// deliberately acausal runner lets the harness verify it can detect
// violations.
using PipelineRunner = std::function<PanelResult(std::span<const Article>)>;

// Perturbs one entity's articles at bin k0. Additive scheme shifts the first
// article in the bin by delta (clipped to the polar mass); synthetic scheme
// appends a fresh observation of score delta at the bin start.
std::vector<Article> inject_impulse(std::span<const Article> articles, const GridSpec& grid,
                                    const ImpulseSpec& spec, std::string_view entity_id);

// Runs the paired clean/perturbed pipelines per entity and reports the
// maximum pre-k0 deviation at the configured output stage. A missing-vs-value
// flip before k0 counts as a violation (+inf). The grid and configuration are
// pinned across the pair; a config-hash mismatch throws.
ImpulseReport run_impulse_test(const PipelineConfig& cfg, std::span<const Article> articles,
                               const ImpulseSpec& spec);

// Harness core used by the self-test: same contract, custom runner.
ImpulseReport run_impulse_test(const PipelineRunner& runner, Stage output_stage,
                               const GridSpec& grid, std::span<const Article> articles,
                               const ImpulseSpec& spec);

// Wraps the configured pipeline and replaces the smoothed stage with a
// centered moving average -- a known causality violation the impulse test
// must flag.
PipelineRunner make_acausal_probe(const PipelineConfig& cfg, const GridSpec& grid,
                                  int half_window = 2);

// ---------------------------------------------------------------------------
// Duplicate robustness test
// ---------------------------------------------------------------------------

struct DuplicateInjectionSpec {
  double fraction = 0.3;         // share of source articles duplicated
  int copies_per_source = 1;
  double score_jitter = 0.0;     // uniform jitter on the copy's score
  double embedding_jitter = 0.0; // angular jitter, capped so grouping holds
  std::uint64_t seed = 0;
};

struct DuplicateEntityResult {
  std::string entity_id;
  double d_no_detect = 0.0;
  double d_detect = 0.0;
};

struct DuplicateReport {
  std::vector<DuplicateEntityResult> entities;
  MetricSummary no_detect_summary;
  MetricSummary detect_summary;
};

// Synthesizes near-duplicates at the observation level: copies inherit the
// source timestamp (same bin by construction) and an embedding kept at
// cosine similarity >= threshold + 0.02.
std::vector<Article> inject_duplicates(std::span<const Article> articles,
                                       const DuplicateInjectionSpec& spec,
                                       double similarity_threshold);

// Baseline on clean input vs. two runs on the augmented input that differ
// only in redundancy control; distances are L1 over bins where both series
// are present, at the configured output stage.
DuplicateReport run_duplicate_test(const PipelineConfig& detect_cfg,
                                   std::span<const Article> articles,
                                   const DuplicateInjectionSpec& spec);

}  // namespace sentio
