#include "sentio/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sentio {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

[[noreturn]] void bad_config(const std::string& what) {
  throw std::invalid_argument("config error: " + what);
}

}  // namespace

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad_config("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
  KeyValueConfig kv;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      bad_config("expected 'key = value' at line " + std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) bad_config("empty key at line " + std::to_string(line_no));
    kv.values_[key] = value;
  }
  return kv;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  consumed_[key] = true;
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  consumed_[key] = true;
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    bad_config("key '" + key + "' is not a number: " + it->second);
  }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  consumed_[key] = true;
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const int v = std::stoi(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    bad_config("key '" + key + "' is not an integer: " + it->second);
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  consumed_[key] = true;
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_config("key '" + key + "' is not a boolean: " + v);
}

void KeyValueConfig::check_consumed() const {
  for (const auto& [key, value] : values_)
    if (!consumed_.count(key)) bad_config("unknown key '" + key + "'");
}

UncertaintyMode parse_uncertainty(const std::string& token) {
  if (token == "none") return UncertaintyMode::none;
  if (token == "entropy") return UncertaintyMode::entropy;
  if (token == "top2_margin" || token == "top2") return UncertaintyMode::top2_margin;
  if (token == "polarity") return UncertaintyMode::polarity;
  bad_config("unknown uncertainty mode '" + token + "'");
}

std::pair<RedundancyMode, double> parse_redundancy(const std::string& token) {
  const auto colon = token.find(':');
  const std::string name = token.substr(0, colon);
  double alpha = 1.0;
  if (colon != std::string::npos) alpha = std::stod(token.substr(colon + 1));
  if (name == "none") return {RedundancyMode::none, alpha};
  if (name == "dedup") return {RedundancyMode::dedup, alpha};
  if (name == "corroborate") return {RedundancyMode::corroborate, alpha};
  bad_config("unknown redundancy mode '" + token + "'");
}

RecencyConfig parse_recency(const std::string& token) {
  if (token == "none") return RecencyConfig{};
  const auto colon = token.find(':');
  if (colon == std::string::npos)
    bad_config("recency token needs form:value, got '" + token + "'");
  const std::string name = token.substr(0, colon);
  const double value = std::stod(token.substr(colon + 1));
  RecencyConfig rc;
  rc.enabled = true;
  rc.value = value;
  if (name == "gamma")
    rc.form = RecencyForm::gamma;
  else if (name == "lambda")
    rc.form = RecencyForm::lambda;
  else if (name == "tau")
    rc.form = RecencyForm::tau;
  else if (name == "alpha")
    rc.form = RecencyForm::alpha;
  else
    bad_config("unknown recency form '" + name + "'");
  return rc;
}

FillConfig parse_fill(const std::string& token) {
  const auto colon = token.find(':');
  const std::string name = token.substr(0, colon);
  FillConfig fc;
  if (name == "none") {
    fc.rule = FillRule::none;
  } else if (name == "constant") {
    fc.rule = FillRule::constant;
  } else if (name == "linear_decay") {
    fc.rule = FillRule::linear_decay;
    if (colon == std::string::npos) bad_config("linear_decay needs a horizon, e.g. linear_decay:4");
    fc.horizon = std::stoi(token.substr(colon + 1));
  } else {
    bad_config("unknown fill rule '" + token + "'");
  }
  return fc;
}

SmootherMethod parse_smoother_method(const std::string& token) {
  if (token == "none") return SmootherMethod::none;
  if (token == "ewma") return SmootherMethod::ewma;
  if (token == "weighted_ewma") return SmootherMethod::weighted_ewma;
  if (token == "kalman") return SmootherMethod::kalman;
  if (token == "kalman_arctanh" || token == "arctanh_kalman") return SmootherMethod::kalman_arctanh;
  // Results-table aliases for the count-aware variants.
  if (token == "kalman_count" || token == "weighted_kalman" || token == "adaptive_count_kalman")
    return SmootherMethod::kalman_count;
  if (token == "kalman_arctanh_count" || token == "weighted_arctanh_kalman")
    return SmootherMethod::kalman_arctanh_count;
  if (token == "beta_binomial") return SmootherMethod::beta_binomial;
  bad_config("unknown smoother '" + token + "'");
}

FisherWeights parse_fisher_weights(const std::string& token) {
  if (token == "mean") return FisherWeights::mean;
  if (token == "n") return FisherWeights::count;
  if (token == "sqrt_n") return FisherWeights::sqrt_count;
  if (token == "log_n") return FisherWeights::log_count;
  if (token == "n2") return FisherWeights::count_squared;
  if (token == "median") return FisherWeights::median;
  bad_config("unknown fisher weights '" + token + "'");
}

namespace {

SmootherConfig smoother_from_kv(const KeyValueConfig& kv, const std::string& method_token) {
  SmootherConfig sc;
  sc.method = parse_smoother_method(method_token);
  sc.alpha = kv.get_double("smoother.alpha", sc.alpha);
  sc.q = kv.get_double("smoother.q", sc.q);
  sc.r = kv.get_double("smoother.r", sc.r);
  sc.p1 = kv.get_double("smoother.p1", sc.p1);
  sc.delta = kv.get_double("smoother.delta", sc.delta);
  sc.t_floor = kv.get_int("smoother.t_floor", sc.t_floor);
  sc.edge_eps = kv.get_double("smoother.edge_eps", sc.edge_eps);
  return sc;
}

Stage parse_stage(const std::string& token) {
  if (token == "aggregated") return Stage::aggregated;
  if (token == "filled") return Stage::filled;
  if (token == "smoothed") return Stage::smoothed;
  bad_config("unknown output stage '" + token + "'");
}

}  // namespace

PipelineConfig parse_pipeline_config(const KeyValueConfig& kv) {
  PipelineConfig cfg;
  const std::string scope = kv.get_string("scope", "global");
  if (scope == "global")
    cfg.scope = AggregationScope::global;
  else if (scope == "local")
    cfg.scope = AggregationScope::local;
  else
    bad_config("unknown scope '" + scope + "'");

  const std::string reducer = kv.get_string("local.reducer", "unweighted_mean");
  if (reducer == "unweighted_mean")
    cfg.reducer = CategoryReducer::unweighted_mean;
  else if (reducer == "count_weighted_mean")
    cfg.reducer = CategoryReducer::count_weighted_mean;
  else
    bad_config("unknown category reducer '" + reducer + "'");

  const auto freq = parse_frequency(kv.get_string("grid.frequency", "weekly"));
  if (!freq) bad_config("unknown grid frequency");
  cfg.grid.frequency = *freq;
  const auto anchor = parse_weekday(kv.get_string("grid.anchor", "friday"));
  if (!anchor) bad_config("unknown grid anchor weekday");
  cfg.grid.anchor = *anchor;
  if (kv.has("grid.start")) cfg.grid.start = parse_instant(kv.get_string("grid.start", ""));
  if (kv.has("grid.end")) cfg.grid.end = parse_instant(kv.get_string("grid.end", ""));

  cfg.weights.uncertainty = parse_uncertainty(kv.get_string("weights.uncertainty", "none"));
  const auto red = parse_redundancy(kv.get_string("weights.redundancy", "none"));
  cfg.weights.redundancy = red.first;
  cfg.weights.dedup_alpha = kv.get_double("weights.dedup_alpha", red.second);
  cfg.weights.recency = parse_recency(kv.get_string("weights.recency", "none"));
  cfg.weights.similarity_threshold =
      kv.get_double("weights.similarity_threshold", cfg.weights.similarity_threshold);

  cfg.fill = parse_fill(kv.get_string("fill.rule", "constant"));
  if (kv.has("fill.horizon")) cfg.fill.horizon = kv.get_int("fill.horizon", cfg.fill.horizon);

  cfg.smoother = smoother_from_kv(kv, kv.get_string("smoother.method", "none"));
  cfg.output_stage = parse_stage(kv.get_string("output_stage", "smoothed"));

  cfg.options.embedding_fallback = kv.get_bool("embedding.fallback", true);
  cfg.options.fallback_dim =
      static_cast<std::size_t>(kv.get_int("embedding.dim", static_cast<int>(cfg.options.fallback_dim)));
  cfg.options.strict_bins = kv.get_bool("strict_bins", false);

  cfg.validate();
  return cfg;
}

SweepSpec parse_sweep(const KeyValueConfig& kv, const PipelineConfig& base) {
  SweepSpec sweep;
  sweep.base = base;
  sweep.display_base = kv.get_int("sweep.display_base", 0);

  if (kv.has("sweep.uncertainty")) {
    sweep.uncertainty.clear();
    for (const auto& t : split_list(kv.get_string("sweep.uncertainty", "")))
      sweep.uncertainty.push_back(parse_uncertainty(t));
  } else {
    sweep.uncertainty = {base.weights.uncertainty};
  }
  if (kv.has("sweep.redundancy")) {
    sweep.redundancy.clear();
    for (const auto& t : split_list(kv.get_string("sweep.redundancy", "")))
      sweep.redundancy.push_back(parse_redundancy(t));
  } else {
    sweep.redundancy = {{base.weights.redundancy, base.weights.dedup_alpha}};
  }
  if (kv.has("sweep.recency")) {
    sweep.recency.clear();
    for (const auto& t : split_list(kv.get_string("sweep.recency", "")))
      sweep.recency.push_back(parse_recency(t));
  } else {
    sweep.recency = {base.weights.recency};
  }
  if (kv.has("sweep.fill")) {
    sweep.fills.clear();
    for (const auto& t : split_list(kv.get_string("sweep.fill", "")))
      sweep.fills.push_back(parse_fill(t));
  } else {
    sweep.fills = {base.fill};
  }
  if (kv.has("sweep.smoother")) {
    sweep.smoothers.clear();
    for (const auto& t : split_list(kv.get_string("sweep.smoother", ""))) {
      SmootherConfig sc = base.smoother;
      sc.method = parse_smoother_method(t);
      sweep.smoothers.push_back(sc);
    }
  } else {
    sweep.smoothers = {base.smoother};
  }
  if (kv.has("sweep.scope")) {
    sweep.scopes.clear();
    for (const auto& t : split_list(kv.get_string("sweep.scope", ""))) {
      if (t == "global")
        sweep.scopes.push_back(AggregationScope::global);
      else if (t == "local")
        sweep.scopes.push_back(AggregationScope::local);
      else
        bad_config("unknown sweep scope '" + t + "'");
    }
  } else {
    sweep.scopes = {base.scope};
  }
  if (sweep.size() == 0) bad_config("sweep has an empty axis");
  return sweep;
}

StudyParams parse_study(const KeyValueConfig& kv) {
  StudyParams p;
  p.ccf_max_lag = kv.get_int("study.ccf_max_lag", p.ccf_max_lag);
  p.dtw_window = kv.get_int("study.dtw_window", p.dtw_window);
  p.dtw_step = kv.get_int("study.dtw_step", p.dtw_step);
  p.dtw_band = kv.get_int("study.dtw_band", p.dtw_band);
  p.dtw_permutations = kv.get_int("study.dtw_permutations", p.dtw_permutations);
  p.dtw_block = kv.get_int("study.dtw_block", p.dtw_band);
  p.granger_window = kv.get_int("study.granger_window", p.granger_window);
  p.granger_step = kv.get_int("study.granger_step", p.granger_step);
  p.granger_lag = kv.get_int("study.granger_lag", p.granger_lag);
  p.welch_segment = kv.get_int("study.welch_segment", p.welch_segment);
  p.coherence_floor = kv.get_double("study.coherence_floor", p.coherence_floor);
  p.fisher = parse_fisher_weights(kv.get_string("study.fisher_weights", "n2"));
  const std::string transform = kv.get_string("study.price_transform", "log_return");
  if (transform == "log_return")
    p.price_transform = PriceTransform::log_return;
  else if (transform == "minmax")
    p.price_transform = PriceTransform::minmax;
  else
    bad_config("unknown price transform '" + transform + "'");
  p.price_window = kv.get_int("study.price_window", p.price_window);
  p.minmax_window = kv.get_int("study.minmax_window", p.minmax_window);
  p.min_matched_obs = kv.get_int("study.min_matched_obs", p.min_matched_obs);
  p.adf_max_lag = kv.get_int("study.adf_max_lag", p.adf_max_lag);
  return p;
}

SynthSpec parse_synth(const KeyValueConfig& kv) {
  SynthSpec s;
  s.entities = kv.get_int("synth.entities", s.entities);
  s.bins = kv.get_int("synth.bins", s.bins);
  if (kv.has("synth.start")) s.start = parse_instant(kv.get_string("synth.start", ""));
  const auto freq = parse_frequency(kv.get_string("synth.frequency", "weekly"));
  if (!freq) bad_config("unknown synth frequency");
  s.frequency = *freq;
  s.articles_per_bin = kv.get_double("synth.articles_per_bin", s.articles_per_bin);
  s.sparsity = kv.get_double("synth.sparsity", s.sparsity);
  s.duplicate_fraction = kv.get_double("synth.duplicate_fraction", s.duplicate_fraction);
  s.duplicate_copies = kv.get_int("synth.duplicate_copies", s.duplicate_copies);
  s.ambiguity = kv.get_double("synth.ambiguity", s.ambiguity);
  s.ar_phi = kv.get_double("synth.ar_phi", s.ar_phi);
  s.ar_sigma = kv.get_double("synth.ar_sigma", s.ar_sigma);
  s.latent_scale = kv.get_double("synth.latent_scale", s.latent_scale);
  s.obs_noise = kv.get_double("synth.obs_noise", s.obs_noise);
  s.price_beta = kv.get_double("synth.price_beta", s.price_beta);
  s.price_lag = kv.get_int("synth.price_lag", s.price_lag);
  s.snr = kv.get_double("synth.snr", s.snr);
  s.categories = kv.get_int("synth.categories", s.categories);
  s.embedding_dim = kv.get_int("synth.embedding_dim", s.embedding_dim);
  return s;
}

}  // namespace sentio
