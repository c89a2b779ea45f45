// Command-line front end: synthetic panel generation, reconstruction,
// label-free evaluation, counterfactual tests, design-study sweeps and the
// market-consistency study.
//
// Exit codes: 0 success, 1 test failure, 2 input error, 3 config error.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sentio/config.hpp"
#include "sentio/counterfactual.hpp"
#include "sentio/io.hpp"
#include "sentio/pipeline.hpp"
#include "sentio/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTestFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitConfigError = 3;

fs::path default_out(const std::string& subcommand) {
  if (const char* root = std::getenv("SENTIO_OUT")) return fs::path(root) / subcommand;
  return fs::path("out") / subcommand;
}

sentio::KeyValueConfig load_kv(const std::string& path) {
  if (path.empty()) return sentio::KeyValueConfig::from_string("");
  return sentio::KeyValueConfig::load(path);
}

json summary_json(const sentio::MetricSummary& s) {
  return json{{"median", s.median}, {"iqr", s.iqr},        {"mean", s.mean},
              {"std", s.std},       {"q10", s.q10},        {"q90", s.q90},
              {"n_entities", s.n_entities}, {"n_excluded", s.n_excluded}};
}

int cmd_synth(const std::string& config_path, const std::string& out_dir, std::uint64_t seed) {
  const auto kv = load_kv(config_path);
  sentio::SynthSpec spec = parse_synth(kv);
  spec.seed = seed;
  const fs::path out = out_dir.empty() ? default_out("synth") : fs::path(out_dir);
  const sentio::SynthPanel panel = generate_panel(spec);

  write_articles_jsonl(out / "articles.jsonl", panel.articles);
  write_prices_csv(out / "prices.csv", panel.prices);
  {
    fs::create_directories(out);
    std::ofstream latent(out / "latent.csv");
    latent << "entity_id,bin,latent,planted_return\n";
    for (const auto& [id, path] : panel.latent) {
      const auto& rets = panel.returns.at(id);
      for (std::size_t k = 0; k < path.size(); ++k)
        latent << id << ',' << k << ',' << sentio::format_value(path[k]) << ','
               << sentio::format_value(rets[k]) << '\n';
    }
  }
  std::cout << "wrote " << panel.articles.size() << " articles, " << panel.prices.size()
            << " price rows to " << out.string() << "\n";
  return kExitOk;
}

int cmd_reconstruct(const std::string& config_path, const std::string& articles_path,
                    const std::string& out_dir, std::uint64_t seed) {
  const auto kv = load_kv(config_path);
  const sentio::PipelineConfig cfg = parse_pipeline_config(kv);
  const auto articles = sentio::load_articles(articles_path);
  const fs::path out = out_dir.empty() ? default_out("reconstruct") : fs::path(out_dir);

  const sentio::PanelResult panel = run_pipeline(cfg, articles);
  for (const auto& entity : panel.entities) {
    if (!entity.ok) {
      std::cerr << "entity " << entity.entity_id << " failed: " << entity.error << "\n";
      continue;
    }
    write_series_csv(out / "series" / (entity.entity_id + ".csv"), panel.grid, entity);
  }

  json manifest;
  manifest["config_hash"] = sentio::config_hash(cfg);
  manifest["config"] = sentio::config_summary(cfg);
  manifest["seed"] = seed;
  manifest["articles_digest"] = sentio::file_digest(articles_path);
  manifest["grid_bins"] = panel.grid.size();
  manifest["grid_start"] = sentio::format_instant(panel.grid.start);
  manifest["grid_end"] = sentio::format_instant(panel.grid.end);
  manifest["entities"] = panel.entities.size();
  std::ofstream mf(out / "manifest.json");
  mf << manifest.dump(2) << '\n';

  std::cout << "reconstructed " << panel.entities.size() << " entities over "
            << panel.grid.size() << " bins -> " << out.string() << "\n";
  return kExitOk;
}

int cmd_evaluate(const std::string& config_path, const std::string& articles_path,
                 const std::string& out_dir, const std::string& format) {
  const auto kv = load_kv(config_path);
  const sentio::PipelineConfig cfg = parse_pipeline_config(kv);
  const auto articles = sentio::load_articles(articles_path);
  const fs::path out = out_dir.empty() ? default_out("evaluate") : fs::path(out_dir);

  const sentio::PanelResult panel = run_pipeline(cfg, articles);
  const sentio::LabelFreeReport report = label_free_report(panel);
  write_metrics_json(out / "metrics.json", report);
  if (format == "csv" || format == "table")
    std::cout << render_metrics_table(report);
  else
    std::cout << "metrics written to " << (out / "metrics.json").string() << "\n";
  return kExitOk;
}

int cmd_counterfactual(const std::string& config_path, const std::string& articles_path,
                       const std::string& out_dir, double tolerance, std::uint64_t seed,
                       bool self_test, double dup_fraction, int dup_copies,
                       double dup_score_jitter, double dup_embedding_jitter) {
  const auto kv = load_kv(config_path);
  sentio::PipelineConfig cfg = parse_pipeline_config(kv);
  const auto articles = sentio::load_articles(articles_path);
  const fs::path out = out_dir.empty() ? default_out("counterfactual") : fs::path(out_dir);
  fs::create_directories(out);

  const sentio::GridSpec grid = resolve_grid(cfg, articles);
  sentio::ImpulseSpec impulse;
  impulse.k0 = grid.size() / 2;
  impulse.tolerance = tolerance;

  sentio::ImpulseReport impulse_report;
  if (self_test) {
    // Known-acausal probe: the harness must flag it.
    const auto probe = make_acausal_probe(cfg, grid);
    impulse_report = run_impulse_test(probe, sentio::Stage::smoothed, grid, articles, impulse);
  } else {
    impulse_report = run_impulse_test(cfg, articles, impulse);
  }

  json jimpulse;
  jimpulse["k0"] = impulse.k0;
  jimpulse["delta"] = impulse.delta;
  jimpulse["tolerance"] = impulse.tolerance;
  jimpulse["pass_rate"] = impulse_report.pass_rate;
  jimpulse["all_pass"] = impulse_report.all_pass;
  jimpulse["d_pre_summary"] = summary_json(impulse_report.d_pre_summary);
  json entities = json::array();
  for (const auto& e : impulse_report.entities)
    entities.push_back({{"entity_id", e.entity_id},
                        {"d_pre", std::isinf(e.d_pre) ? json() : json(e.d_pre)},
                        {"pass", e.pass},
                        {"skipped", e.skipped}});
  jimpulse["entities"] = entities;
  {
    std::ofstream f(out / "impulse.json");
    f << jimpulse.dump(2) << '\n';
  }

  // Duplicate robustness needs a redundancy-enabled configuration.
  if (cfg.weights.redundancy != sentio::RedundancyMode::none && !self_test) {
    sentio::DuplicateInjectionSpec dup;
    dup.fraction = dup_fraction;
    dup.copies_per_source = dup_copies;
    dup.score_jitter = dup_score_jitter;
    dup.embedding_jitter = dup_embedding_jitter;
    dup.seed = seed;
    const sentio::DuplicateReport dup_report = run_duplicate_test(cfg, articles, dup);
    json jdup;
    jdup["fraction"] = dup.fraction;
    jdup["copies_per_source"] = dup.copies_per_source;
    jdup["no_detect_summary"] = summary_json(dup_report.no_detect_summary);
    jdup["detect_summary"] = summary_json(dup_report.detect_summary);
    json dents = json::array();
    for (const auto& e : dup_report.entities)
      dents.push_back({{"entity_id", e.entity_id},
                       {"d_no_detect", e.d_no_detect},
                       {"d_detect", e.d_detect}});
    jdup["entities"] = dents;
    std::ofstream f(out / "duplicates.json");
    f << jdup.dump(2) << '\n';
  }

  std::cout << "impulse pass rate " << impulse_report.pass_rate << " ("
            << (impulse_report.all_pass ? "PASS" : "FAIL") << ")\n";
  return impulse_report.all_pass ? kExitOk : kExitTestFailure;
}

int cmd_sweep(const std::string& config_path, const std::string& articles_path,
              const std::string& out_dir, int jobs, bool design, bool write_series) {
  const auto kv = load_kv(config_path);
  const sentio::PipelineConfig base = parse_pipeline_config(kv);
  const sentio::SweepSpec sweep = parse_sweep(kv, base);
  const auto articles = sentio::load_articles(articles_path);
  const fs::path out = out_dir.empty() ? default_out("sweep") : fs::path(out_dir);
  fs::create_directories(out);

  write_manifest_csv(out / "manifest.csv", sweep);

  if (design) {
    const auto spec = sentio::default_design_study(base);
    const auto rows = run_design_study(spec, articles);
    write_design_csv(out / "design.csv", rows);
    std::cout << render_design_table(rows);
    return kExitOk;
  }

  const auto configs = enumerate_configs(sweep);
  const sentio::GridSpec grid = resolve_grid(base, articles);
  std::vector<sentio::PanelResult> panels(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      panels[i] = run_pipeline(configs[i].second, articles, &grid);
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

  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& [label, cfg] = configs[i];
    write_metrics_json(out / "metrics" / (label + ".json"), label_free_report(panels[i]));
    if (write_series)
      for (const auto& entity : panels[i].entities)
        if (entity.ok)
          write_series_csv(out / "series" / label / (entity.entity_id + ".csv"), grid, entity);
  }
  std::cout << "swept " << configs.size() << " configurations -> " << out.string() << "\n";
  return kExitOk;
}

int cmd_consistency(const std::string& config_path, const std::string& articles_path,
                    const std::string& prices_path, const std::string& out_dir, int jobs,
                    std::uint64_t seed) {
  const auto kv = load_kv(config_path);
  const sentio::PipelineConfig base = parse_pipeline_config(kv);
  const sentio::SweepSpec sweep = parse_sweep(kv, base);
  sentio::StudyParams params = parse_study(kv);
  params.seed = seed;
  const auto articles = sentio::load_articles(articles_path);
  const auto prices = sentio::load_prices_csv(prices_path);
  const fs::path out = out_dir.empty() ? default_out("consistency") : fs::path(out_dir);

  const auto rows = run_consistency_study(sweep, articles, prices, params, jobs);
  write_consistency_csv(out / "consistency.csv", rows);
  std::cout << "config_id,n_entities,ccf_lag,ccf_rho,granger_sp_pct,mid_coh,dtw_mean,score\n";
  for (std::size_t i = 0; i < std::min<std::size_t>(rows.size(), 10); ++i) {
    const auto& r = rows[i];
    std::cout << r.config_id << ',' << r.n_entities << ',' << r.ccf_lag << ',' << r.ccf_rho << ','
              << r.granger_sp_pct << ',' << r.mid_coh << ',' << r.dtw_mean << ',' << r.score
              << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal sentiment series reconstruction and diagnostics"};
  app.require_subcommand(1);

  std::string config_path, articles_path, prices_path, out_dir;
  std::string format = "json";
  std::uint64_t seed = 42;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  double tolerance = 1e-9;
  bool self_test = false, design = false, write_series = false;
  double dup_fraction = 0.3, dup_score_jitter = 0.05, dup_embedding_jitter = 0.1;
  int dup_copies = 1;

  auto add_common = [&](CLI::App* sub, bool needs_articles) {
    sub->add_option("--config", config_path, "flat key-value configuration file");
    if (needs_articles)
      sub->add_option("--articles", articles_path, "article JSONL or CSV")->required();
    sub->add_option("--out", out_dir, "output directory (default $SENTIO_OUT/<cmd>)");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--jobs", jobs, "worker threads");
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic panel");
  add_common(synth, false);

  CLI::App* reconstruct = app.add_subcommand("reconstruct", "run the staged pipeline");
  add_common(reconstruct, true);
  reconstruct->add_option("--stage", format, "ignored; all stages are written");

  CLI::App* evaluate = app.add_subcommand("evaluate", "label-free metric report");
  add_common(evaluate, true);
  evaluate->add_option("--format", format, "json|table");

  CLI::App* counterfactual = app.add_subcommand("counterfactual", "impulse and duplicate tests");
  add_common(counterfactual, true);
  counterfactual->add_option("--tolerance", tolerance, "impulse pass tolerance");
  counterfactual->add_flag("--self-test", self_test,
                           "run the harness against a known-acausal smoother (expected to fail)");
  counterfactual->add_option("--dup-fraction", dup_fraction, "share of articles duplicated");
  counterfactual->add_option("--dup-copies", dup_copies, "copies per duplicated source");
  counterfactual->add_option("--dup-score-jitter", dup_score_jitter, "score jitter on copies");
  counterfactual->add_option("--dup-embedding-jitter", dup_embedding_jitter,
                             "angular embedding jitter on copies");

  CLI::App* sweep = app.add_subcommand("sweep", "enumerate and run a configuration sweep");
  add_common(sweep, true);
  sweep->add_flag("--design", design, "run the stage-by-stage design study instead");
  sweep->add_flag("--series", write_series, "also write per-config series files");

  CLI::App* consistency = app.add_subcommand("consistency", "market-consistency study");
  add_common(consistency, true);
  consistency->add_option("--prices", prices_path, "prices CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (synth->parsed()) return cmd_synth(config_path, out_dir, seed);
    if (reconstruct->parsed()) return cmd_reconstruct(config_path, articles_path, out_dir, seed);
    if (evaluate->parsed()) return cmd_evaluate(config_path, articles_path, out_dir, format);
    if (counterfactual->parsed())
      return cmd_counterfactual(config_path, articles_path, out_dir, tolerance, seed, self_test,
                                dup_fraction, dup_copies, dup_score_jitter, dup_embedding_jitter);
    if (sweep->parsed())
      return cmd_sweep(config_path, articles_path, out_dir, jobs, design, write_series);
    if (consistency->parsed())
      return cmd_consistency(config_path, articles_path, prices_path, out_dir, jobs, seed);
  } catch (const sentio::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
