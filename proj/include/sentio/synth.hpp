#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sentio/core.hpp"

namespace sentio {

// Generator parameters for synthetic panels. Every random draw flows from
// `seed` through named substreams, so panels are reproducible and
// insensitive to evaluation order.
struct SynthSpec {
  int entities = 10;
  int bins = 80;
  Instant start = 0;  // grid start; snapped to a boundary internally
  GridFrequency frequency = GridFrequency::weekly;
  Weekday anchor = Weekday::friday;

  double articles_per_bin = 3.0;  // Poisson mean for covered bins (min 1)
  double sparsity = 0.2;          // probability a bin has no articles
  double duplicate_fraction = 0.0;
  int duplicate_copies = 2;
  double ambiguity = 0.2;     // share of articles with a dominant neutral mass
  double ar_phi = 0.8;        // latent AR(1) coefficient
  double ar_sigma = 0.25;     // latent innovation scale
  double latent_scale = 0.6;  // amplitude of the latent score path
  double obs_noise = 0.2;     // article-level score noise around the latent

  double price_beta = 0.5;  // planted return loading on lagged sentiment
  int price_lag = 3;        // returns respond to sentiment(k - lag)
  double snr = 1.0;         // var(beta*s) / var(noise); <= 0 disables coupling

  int categories = 2;
  int embedding_dim = 16;
  std::uint64_t seed = 42;
};

struct PriceRow {
  std::string entity_id;
  Instant date = 0;
  double close = 0.0;
};

struct SynthPanel {
  GridSpec grid;
  std::vector<Article> articles;
  std::vector<PriceRow> prices;  // one close per (entity, bin), dated bin end
  std::map<std::string, std::vector<double>> latent;   // per-entity latent path
  std::map<std::string, std::vector<double>> returns;  // per-entity planted returns
};

SynthPanel generate_panel(const SynthSpec& spec);

}  // namespace sentio
