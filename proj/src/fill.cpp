#include "sentio/fill.hpp"

#include <algorithm>
#include <stdexcept>

namespace sentio {

void FillConfig::validate() const {
  if (rule == FillRule::linear_decay && horizon < 1)
    throw std::invalid_argument("fill horizon must be >= 1");
}

std::string_view fill_rule_name(FillRule r) {
  switch (r) {
    case FillRule::none: return "none";
    case FillRule::constant: return "constant";
    case FillRule::linear_decay: return "linear_decay";
  }
  return "?";
}

double fill_decay(const FillConfig& cfg, int d) {
  if (d < 0) throw std::invalid_argument("fill decay at negative distance");
  switch (cfg.rule) {
    case FillRule::none:
    case FillRule::constant:
      return 1.0;
    case FillRule::linear_decay:
      return std::max(0.0, 1.0 - static_cast<double>(d) / static_cast<double>(cfg.horizon));
  }
  return 1.0;
}

FilledSeries causal_fill(const AggregatedSeries& input, const FillConfig& cfg) {
  cfg.validate();
  GridSeries out = input.series;
  out.stage = Stage::filled;
  if (cfg.rule == FillRule::none) return FilledSeries{std::move(out)};

  // Distance is measured from the last true observation; filled values are
  // never treated as observations themselves.
  std::ptrdiff_t last_observed = -1;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    if (!is_missing(input.series.values[k])) {
      last_observed = static_cast<std::ptrdiff_t>(k);
      continue;
    }
    if (last_observed < 0) continue;  // leading gap stays missing
    const int d = static_cast<int>(static_cast<std::ptrdiff_t>(k) - last_observed);
    out.values[k] = fill_decay(cfg, d) * input.series.values[last_observed];
  }
  return FilledSeries{std::move(out)};
}

}  // namespace sentio
