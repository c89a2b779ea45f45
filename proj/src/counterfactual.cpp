#include "sentio/counterfactual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "sentio/stats.hpp"

namespace sentio {

namespace {

ProbabilityTriple triple_with_score(double score, double neutral_mass) {
  const double cap = 1.0 - neutral_mass;
  score = std::clamp(score, -cap, cap);
  return ProbabilityTriple::ingest((cap + score) / 2.0, (cap - score) / 2.0, neutral_mass);
}

// Max |a - b| over bins < k0; a missingness flip is an infinite deviation.
double pre_impulse_deviation(const GridSeries& clean, const GridSeries& perturbed,
                             std::size_t k0) {
  double d = 0.0;
  for (std::size_t k = 0; k < std::min({clean.size(), perturbed.size(),
                                        static_cast<std::size_t>(k0)});
       ++k) {
    const bool m1 = is_missing(clean.values[k]);
    const bool m2 = is_missing(perturbed.values[k]);
    if (m1 && m2) continue;
    if (m1 != m2) return std::numeric_limits<double>::infinity();
    d = std::max(d, std::abs(clean.values[k] - perturbed.values[k]));
  }
  return d;
}

}  // namespace

std::vector<Article> inject_impulse(std::span<const Article> articles, const GridSpec& grid,
                                    const ImpulseSpec& spec, std::string_view entity_id) {
  if (spec.k0 >= grid.size()) throw std::invalid_argument("impulse bin outside the grid");
  std::vector<Article> out(articles.begin(), articles.end());

  if (spec.scheme == ImpulseScheme::additive_existing) {
    for (Article& a : out) {
      if (a.entity_id != entity_id) continue;
      const auto k = grid.bin_of(a.timestamp);
      if (!k || *k != spec.k0) continue;
      const double score = score_article(a.probs) + spec.delta;
      a.probs = triple_with_score(score, a.probs.p_neu);
      return out;
    }
    throw std::runtime_error("no article of entity in the impulse bin");
  }

  Article synthetic;
  synthetic.entity_id = std::string(entity_id);
  synthetic.timestamp = grid.bin_start(spec.k0);
  synthetic.probs = triple_with_score(spec.delta, 0.0);
  synthetic.category = "impulse";
  synthetic.title = "impulse probe";
  // Dimension must match the panel; borrow it from any embedded article.
  for (const Article& a : articles)
    if (!a.embedding.empty()) {
      synthetic.embedding = hash_embedding("impulse probe", a.embedding.size());
      break;
    }
  out.push_back(std::move(synthetic));
  return out;
}

ImpulseReport run_impulse_test(const PipelineRunner& runner, Stage output_stage,
                               const GridSpec& grid, std::span<const Article> articles,
                               const ImpulseSpec& spec) {
  if (spec.k0 >= grid.size()) throw std::invalid_argument("impulse bin outside the grid");
  const PanelResult clean = runner(articles);

  ImpulseReport report;
  std::vector<double> deviations;
  int n_pass = 0, n_tested = 0;
  for (const EntityStages& entity : clean.entities) {
    if (!entity.ok) continue;
    ImpulseEntityResult r;
    r.entity_id = entity.entity_id;

    std::vector<Article> perturbed_articles;
    try {
      perturbed_articles = inject_impulse(articles, grid, spec, entity.entity_id);
    } catch (const std::runtime_error&) {
      r.skipped = true;  // additive scheme, empty impulse bin
      report.entities.push_back(std::move(r));
      continue;
    }
    const PanelResult perturbed = runner(perturbed_articles);
    const EntityStages* p = perturbed.find(entity.entity_id);
    if (!p || !p->ok) {
      r.skipped = true;
      report.entities.push_back(std::move(r));
      continue;
    }
    r.d_pre = pre_impulse_deviation(entity.at_stage(output_stage), p->at_stage(output_stage),
                                    spec.k0);
    r.pass = r.d_pre <= spec.tolerance;
    ++n_tested;
    if (r.pass) ++n_pass;
    deviations.push_back(std::isinf(r.d_pre) ? std::numeric_limits<double>::max() : r.d_pre);
    report.entities.push_back(std::move(r));
  }

  if (!deviations.empty()) report.d_pre_summary = cross_section_summary(deviations);
  report.pass_rate = n_tested > 0 ? static_cast<double>(n_pass) / n_tested : 0.0;
  report.all_pass = n_tested > 0 && n_pass == n_tested;
  return report;
}

ImpulseReport run_impulse_test(const PipelineConfig& cfg, std::span<const Article> articles,
                               const ImpulseSpec& spec) {
  const GridSpec grid = resolve_grid(cfg, articles);
  const std::uint64_t hash_before = config_hash(cfg);
  auto runner = [&cfg, &grid, hash_before](std::span<const Article> input) {
    if (config_hash(cfg) != hash_before)
      throw std::logic_error("pipeline hyperparameters changed between paired runs");
    return run_pipeline(cfg, input, &grid);
  };
  return run_impulse_test(runner, cfg.output_stage, grid, articles, spec);
}

PipelineRunner make_acausal_probe(const PipelineConfig& cfg, const GridSpec& grid,
                                  int half_window) {
  PipelineConfig frozen = cfg;
  GridSpec frozen_grid = grid;
  return [frozen, frozen_grid, half_window](std::span<const Article> articles) {
    PanelResult panel = run_pipeline(frozen, articles, &frozen_grid);
    for (EntityStages& e : panel.entities) {
      if (!e.ok) continue;
      const std::vector<double>& src = e.filled.series.values;
      std::vector<double> out(src.size(), missing());
      const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(src.size());
      for (std::ptrdiff_t k = 0; k < n; ++k) {
        double sum = 0.0;
        int cnt = 0;
        for (std::ptrdiff_t j = k - half_window; j <= k + half_window; ++j) {
          if (j < 0 || j >= n || is_missing(src[j])) continue;
          sum += src[j];
          ++cnt;
        }
        if (cnt > 0) out[k] = sum / cnt;  // uses future bins: deliberately acausal
      }
      e.smoothed.series.values = std::move(out);
    }
    return panel;
  };
}

std::vector<Article> inject_duplicates(std::span<const Article> articles,
                                       const DuplicateInjectionSpec& spec,
                                       double similarity_threshold) {
  if (!(spec.fraction > 0.0 && spec.fraction <= 1.0))
    throw std::invalid_argument("duplicate fraction must lie in (0,1]");
  if (spec.copies_per_source < 1)
    throw std::invalid_argument("copies per source must be >= 1");

  // Respect the grouping margin: cap the angular jitter so copies stay above
  // threshold + 0.02 similarity to their source.
  const double min_cos = std::min(1.0, similarity_threshold + 0.02);

  // Group indices per entity to sample sources entity by entity.
  std::map<std::string, std::vector<std::size_t>> by_entity;
  for (std::size_t i = 0; i < articles.size(); ++i)
    by_entity[articles[i].entity_id].push_back(i);

  std::vector<Article> out(articles.begin(), articles.end());
  for (const auto& [entity, indices] : by_entity) {
    auto pick_rng = make_rng(spec.seed, "dup-select", fnv1a64(entity));
    auto jitter_rng = make_rng(spec.seed, "dup-jitter", fnv1a64(entity));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const std::size_t n_sources = static_cast<std::size_t>(
        std::llround(spec.fraction * static_cast<double>(indices.size())));
    std::vector<std::size_t> shuffled = indices;
    std::shuffle(shuffled.begin(), shuffled.end(), pick_rng);
    shuffled.resize(std::min(n_sources, shuffled.size()));
    std::sort(shuffled.begin(), shuffled.end());

    for (std::size_t src_idx : shuffled) {
      const Article& src = articles[src_idx];
      for (int c = 0; c < spec.copies_per_source; ++c) {
        Article copy = src;
        copy.title += " (dup)";
        if (spec.score_jitter > 0.0) {
          const double jit = (2.0 * unif(jitter_rng) - 1.0) * spec.score_jitter;
          copy.probs = triple_with_score(score_article(src.probs) + jit, src.probs.p_neu);
        }
        if (spec.embedding_jitter > 0.0 && !copy.embedding.empty()) {
          const double requested_cos = std::cos(spec.embedding_jitter);
          const double target = std::max(requested_cos, min_cos);
          // Rotate toward a random orthogonal direction by the capped angle.
          std::vector<double> u(copy.embedding.size());
          double norm = 0.0, dot = 0.0;
          for (std::size_t i = 0; i < u.size(); ++i) u[i] = gauss(jitter_rng);
          for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * copy.embedding[i];
          double src_norm2 = 0.0;
          for (double v : copy.embedding) src_norm2 += v * v;
          for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] -= dot * copy.embedding[i] / std::max(src_norm2, 1e-300);
            norm += u[i] * u[i];
          }
          if (norm > 1e-12) {
            norm = std::sqrt(norm);
            const double sin_part = std::sqrt(std::max(0.0, 1.0 - target * target));
            const double src_norm = std::sqrt(src_norm2);
            for (std::size_t i = 0; i < u.size(); ++i)
              copy.embedding[i] =
                  target * copy.embedding[i] + sin_part * src_norm * u[i] / norm;
          }
        }
        out.push_back(std::move(copy));
      }
    }
  }
  return out;
}

namespace {

double l1_distance(const GridSeries& a, const GridSeries& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
    if (is_missing(a.values[k]) || is_missing(b.values[k])) continue;
    d += std::abs(a.values[k] - b.values[k]);
  }
  return d;
}

}  // namespace

DuplicateReport run_duplicate_test(const PipelineConfig& detect_cfg,
                                   std::span<const Article> articles,
                                   const DuplicateInjectionSpec& spec) {
  if (detect_cfg.weights.redundancy == RedundancyMode::none)
    throw std::invalid_argument("duplicate test needs a redundancy-enabled configuration");

  PipelineConfig no_detect_cfg = detect_cfg;
  no_detect_cfg.weights.redundancy = RedundancyMode::none;

  // The paired runs must differ in redundancy control alone.
  {
    PipelineConfig a = detect_cfg, b = no_detect_cfg;
    a.weights.redundancy = RedundancyMode::none;
    a.weights.dedup_alpha = 1.0;
    b.weights.dedup_alpha = 1.0;
    if (config_hash(a) != config_hash(b))
      throw std::logic_error("paired duplicate-test configurations diverge beyond redundancy");
  }

  const GridSpec grid = resolve_grid(detect_cfg, articles);
  const std::vector<Article> augmented =
      inject_duplicates(articles, spec, detect_cfg.weights.similarity_threshold);

  const PanelResult baseline = run_pipeline(detect_cfg, articles, &grid);
  const PanelResult with_detect = run_pipeline(detect_cfg, augmented, &grid);
  const PanelResult without_detect = run_pipeline(no_detect_cfg, augmented, &grid);

  DuplicateReport report;
  std::vector<double> d_no, d_yes;
  for (const EntityStages& base : baseline.entities) {
    if (!base.ok) continue;
    const EntityStages* on = with_detect.find(base.entity_id);
    const EntityStages* off = without_detect.find(base.entity_id);
    if (!on || !off || !on->ok || !off->ok) continue;
    DuplicateEntityResult r;
    r.entity_id = base.entity_id;
    r.d_detect = l1_distance(base.at_stage(detect_cfg.output_stage),
                             on->at_stage(detect_cfg.output_stage));
    r.d_no_detect = l1_distance(base.at_stage(detect_cfg.output_stage),
                                off->at_stage(detect_cfg.output_stage));
    d_yes.push_back(r.d_detect);
    d_no.push_back(r.d_no_detect);
    report.entities.push_back(std::move(r));
  }
  if (!d_no.empty()) {
    report.no_detect_summary = cross_section_summary(d_no);
    report.detect_summary = cross_section_summary(d_yes);
  }
  return report;
}

}  // namespace sentio
