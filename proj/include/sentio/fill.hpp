#pragma once

#include <string_view>

#include "sentio/core.hpp"

namespace sentio {

enum class FillRule { none, constant, linear_decay };

struct FillConfig {
  FillRule rule = FillRule::constant;
  int horizon = 1;  // carry-forward horizon H, linear_decay only

  void validate() const;
};

std::string_view fill_rule_name(FillRule r);

// Causal gap completion. Observed bins pass through unchanged; a missing bin
// at distance d from the last observation gets decay(d) times that value.
// Bins before the first observation stay missing. Counts copy through.
FilledSeries causal_fill(const AggregatedSeries& input, const FillConfig& cfg);

// Staleness factor g(d): 1 for constant fill, max(0, 1 - d/H) for
// linear decay. g(0) == 1 for every rule.
double fill_decay(const FillConfig& cfg, int steps_since_observation);

}  // namespace sentio
