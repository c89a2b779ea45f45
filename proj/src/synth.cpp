#include "sentio/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "sentio/stats.hpp"

namespace sentio {

namespace {

std::string entity_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "E%03d", i);
  return buf;
}

std::vector<double> random_unit_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = gauss(rng);
      norm += x * x;
    }
  } while (norm <= 1e-12);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

// Perturbs a unit vector along a random orthogonal direction so that the
// cosine similarity to the original equals `target_cos`.
std::vector<double> jitter_unit_vector(const std::vector<double>& e, double target_cos,
                                       std::mt19937_64& rng) {
  target_cos = std::clamp(target_cos, -1.0, 1.0);
  std::vector<double> u = random_unit_vector(rng, static_cast<int>(e.size()));
  double dot = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) dot += u[i] * e[i];
  double norm = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    u[i] -= dot * e[i];
    norm += u[i] * u[i];
  }
  if (norm <= 1e-12) return e;
  norm = std::sqrt(norm);
  const double sin_part = std::sqrt(std::max(0.0, 1.0 - target_cos * target_cos));
  std::vector<double> out(e.size());
  for (std::size_t i = 0; i < e.size(); ++i)
    out[i] = target_cos * e[i] + sin_part * u[i] / norm;
  return out;
}

ProbabilityTriple triple_from_score(double score, double neutral_mass) {
  neutral_mass = std::clamp(neutral_mass, 0.0, 0.98);
  const double cap = (1.0 - neutral_mass) * 0.999;
  score = std::clamp(score, -cap, cap);
  const double pos = (1.0 - neutral_mass + score) / 2.0;
  const double neg = (1.0 - neutral_mass - score) / 2.0;
  return ProbabilityTriple::ingest(pos, neg, neutral_mass);
}

}  // namespace

SynthPanel generate_panel(const SynthSpec& spec) {
  if (spec.entities < 1 || spec.bins < 1) throw std::invalid_argument("empty synthetic panel");
  if (spec.embedding_dim < 2) throw std::invalid_argument("embedding dimension too small");

  SynthPanel panel;
  Instant start = spec.start != 0 ? spec.start : parse_instant("2024-01-06");
  start = floor_to_boundary(start, spec.frequency, spec.anchor);
  Instant end = start;
  for (int k = 0; k < spec.bins; ++k) end = next_boundary(end, spec.frequency, spec.anchor);
  panel.grid = build_grid(start, end, spec.frequency, spec.anchor);

  for (int e = 0; e < spec.entities; ++e) {
    const std::string id = entity_name(e);
    auto latent_rng = make_rng(spec.seed, "latent", e);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Latent AR(1) path mapped into (-1, 1).
    std::vector<double> latent(spec.bins);
    const double stat_sd =
        spec.ar_sigma / std::sqrt(std::max(1e-12, 1.0 - spec.ar_phi * spec.ar_phi));
    double x = stat_sd * gauss(latent_rng);
    for (int k = 0; k < spec.bins; ++k) {
      latent[k] = spec.latent_scale * std::tanh(x);
      x = spec.ar_phi * x + spec.ar_sigma * gauss(latent_rng);
    }
    panel.latent[id] = latent;

    // Articles.
    auto art_rng = make_rng(spec.seed, "articles", e);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::poisson_distribution<int> pois(std::max(0.1, spec.articles_per_bin));
    std::vector<Article> entity_articles;
    for (int k = 0; k < spec.bins; ++k) {
      if (unif(art_rng) < spec.sparsity) continue;
      const int count = std::max(1, pois(art_rng));
      const Instant lo = panel.grid.bin_start(k);
      const Instant hi = panel.grid.bin_end(k);
      for (int a = 0; a < count; ++a) {
        Article art;
        art.entity_id = id;
        art.timestamp =
            lo + static_cast<Instant>(unif(art_rng) * static_cast<double>(hi - lo - 1));
        const double score = latent[k] + spec.obs_noise * gauss(art_rng);
        const bool ambiguous = unif(art_rng) < spec.ambiguity;
        const double neutral =
            ambiguous ? 0.5 + 0.3 * unif(art_rng) : 0.05 + 0.25 * unif(art_rng);
        art.probs = triple_from_score(score, neutral);
        art.category = "cat_" + std::to_string(static_cast<int>(unif(art_rng) * spec.categories));
        art.embedding = random_unit_vector(art_rng, spec.embedding_dim);
        art.title = id + " story " + std::to_string(k) + "." + std::to_string(a);
        entity_articles.push_back(std::move(art));
      }
    }

    // Natural near-duplicates: copies share the source's bin and posterior,
    // with embeddings kept above a 0.9 cosine similarity.
    if (spec.duplicate_fraction > 0.0 && !entity_articles.empty()) {
      auto dup_rng = make_rng(spec.seed, "duplicates", e);
      std::uniform_real_distribution<double> unif2(0.0, 1.0);
      const std::size_t base = entity_articles.size();
      for (std::size_t i = 0; i < base; ++i) {
        if (unif2(dup_rng) >= spec.duplicate_fraction) continue;
        for (int c = 0; c < spec.duplicate_copies; ++c) {
          Article copy = entity_articles[i];
          copy.embedding = jitter_unit_vector(copy.embedding, 0.93, dup_rng);
          copy.title += " (wire)";
          entity_articles.push_back(std::move(copy));
        }
      }
    }
    panel.articles.insert(panel.articles.end(), entity_articles.begin(), entity_articles.end());

    // Prices: planted lagged dependence on the latent path.
    auto price_rng = make_rng(spec.seed, "prices", e);
    const double sd_latent = sample_std(latent);
    double noise_sd = 0.02;
    const bool coupled = spec.snr > 0.0 && spec.price_beta != 0.0 && sd_latent > 0.0;
    if (coupled) noise_sd = std::abs(spec.price_beta) * sd_latent / std::sqrt(spec.snr);
    std::vector<double> returns(spec.bins, 0.0);
    double close = 100.0;
    for (int k = 0; k < spec.bins; ++k) {
      double ret = noise_sd * gauss(price_rng);
      if (coupled && k >= spec.price_lag) ret += spec.price_beta * latent[k - spec.price_lag];
      returns[k] = ret;
      close *= std::exp(ret);
      PriceRow row;
      row.entity_id = id;
      row.date = panel.grid.bin_end(k) - kSecondsPerDay;  // last day inside the bin
      row.close = close;
      panel.prices.push_back(row);
    }
    panel.returns[id] = std::move(returns);
  }
  return panel;
}

}  // namespace sentio
