#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sentio {

// Missing grid values are carried as quiet NaN.
inline double missing() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return v != v; }

// ---------------------------------------------------------------------------
// Time. Instants are seconds since the Unix epoch, UTC, second resolution.
// ---------------------------------------------------------------------------

using Instant = std::int64_t;

inline constexpr std::int64_t kSecondsPerDay = 86400;

enum class Weekday {
  sunday = 0,
  monday,
  tuesday,
  wednesday,
  thursday,
  friday,
  saturday
};

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(std::int64_t days, int& year, unsigned& month, unsigned& day);
Weekday weekday_of_day(std::int64_t days);

// Accepts "YYYY-MM-DD" and "YYYY-MM-DDTHH:MM:SS[.frac][Z|+HH:MM|-HH:MM]"
// (also a space instead of 'T'). Offsets are converted to UTC; fractional
// seconds are truncated. Throws std::invalid_argument on malformed input.
Instant parse_instant(std::string_view text);
std::string format_instant(Instant t);  // YYYY-MM-DDTHH:MM:SSZ
std::string format_date(Instant t);     // YYYY-MM-DD

std::optional<Weekday> parse_weekday(std::string_view name);
std::string_view weekday_name(Weekday d);

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct ProbabilityTriple {
  double p_pos = 0.0;
  double p_neg = 0.0;
  double p_neu = 1.0;

  // Renormalizes when the sum is within 1e-6 of 1; rejects anything worse or
  // any component outside [0,1]. Throws std::invalid_argument.
  static ProbabilityTriple ingest(double pos, double neg, double neu);
};

// Scalar sentiment score in [-1, 1].
inline double score_article(const ProbabilityTriple& p) { return p.p_pos - p.p_neg; }

struct Article {
  std::string entity_id;
  Instant timestamp = 0;
  ProbabilityTriple probs;
  std::string category;
  std::vector<double> embedding;  // empty = absent
  std::string title;              // empty = absent
};

// ---------------------------------------------------------------------------
// Temporal grid. Bins are half-open [edges[k], edges[k+1]); edges are strictly
// increasing and partition [start, end) with no gaps.
// ---------------------------------------------------------------------------

enum class GridFrequency { daily, weekly, monthly, quarterly };

std::string_view frequency_name(GridFrequency f);
std::optional<GridFrequency> parse_frequency(std::string_view name);

struct GridSpec {
  Instant start = 0;
  Instant end = 0;
  GridFrequency frequency = GridFrequency::weekly;
  Weekday anchor = Weekday::friday;  // weekly grids only
  std::vector<Instant> edges;        // size() + 1 entries

  std::size_t size() const { return edges.empty() ? 0 : edges.size() - 1; }
  Instant bin_start(std::size_t k) const { return edges[k]; }
  Instant bin_end(std::size_t k) const { return edges[k + 1]; }
  std::optional<std::size_t> bin_of(Instant t) const;
};

GridSpec build_grid(Instant start, Instant end, GridFrequency frequency,
                    Weekday anchor = Weekday::friday);

// Largest grid boundary <= t / smallest boundary > t, for deriving grid
// extents from data.
Instant floor_to_boundary(Instant t, GridFrequency f, Weekday anchor);
Instant next_boundary(Instant t, GridFrequency f, Weekday anchor);

enum class Stage { aggregated, filled, smoothed };

std::string_view stage_name(Stage s);

struct GridSeries {
  std::string entity_id;
  std::vector<double> values;  // NaN = missing
  std::vector<int> counts;     // raw article count per bin
  Stage stage = Stage::aggregated;

  std::size_t size() const { return values.size(); }
};

// Stage-typed wrappers. Fill consumes an aggregated series and smoothing a
// filled one; the wrapper types make out-of-order pipelines unrepresentable.
struct AggregatedSeries {
  GridSeries series;
};
struct FilledSeries {
  GridSeries series;
};
struct SmoothedSeries {
  GridSeries series;
};

// ---------------------------------------------------------------------------
// Bin assignment
// ---------------------------------------------------------------------------

struct BinAssignment {
  std::vector<std::vector<std::size_t>> members;  // article indices per bin
  std::vector<int> counts;
  std::size_t n_rejected = 0;  // out-of-horizon articles (non-strict mode)
};

// Assigns each in-horizon article to exactly one bin. Out-of-horizon
// timestamps are dropped with a counter, or throw when strict is set.
BinAssignment assign_bins(std::span<const Article> articles, const GridSpec& grid,
                          bool strict = false);

}  // namespace sentio
