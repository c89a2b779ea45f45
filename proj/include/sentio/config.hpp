#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "sentio/pipeline.hpp"
#include "sentio/synth.hpp"

namespace sentio {

// Flat "key = value" document; '#' starts a comment, blank lines ignored.
// Unknown keys are rejected so typos fail loudly.
class KeyValueConfig {
 public:
  static KeyValueConfig load(const std::filesystem::path& path);
  static KeyValueConfig from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Keys never read back are configuration errors.
  void check_consumed() const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> consumed_;
};

// Axis tokens for sweeps and single configs. Throws std::invalid_argument on
// unknown names; accepts the table-label aliases weighted_kalman /
// adaptive_count_kalman / weighted_arctanh_kalman for the count-aware
// variants.
UncertaintyMode parse_uncertainty(const std::string& token);
std::pair<RedundancyMode, double> parse_redundancy(const std::string& token);  // "dedup:0.5"
RecencyConfig parse_recency(const std::string& token);                          // "tau:5"
FillConfig parse_fill(const std::string& token);                                // "linear_decay:4"
SmootherMethod parse_smoother_method(const std::string& token);
FisherWeights parse_fisher_weights(const std::string& token);

PipelineConfig parse_pipeline_config(const KeyValueConfig& kv);
SweepSpec parse_sweep(const KeyValueConfig& kv, const PipelineConfig& base);
StudyParams parse_study(const KeyValueConfig& kv);
SynthSpec parse_synth(const KeyValueConfig& kv);

}  // namespace sentio
