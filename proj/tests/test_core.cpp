#include <doctest.h>

#include <random>
#include <set>

#include "helpers.hpp"
#include "sentio/core.hpp"

using namespace sentio;

TEST_CASE("article score is positive minus negative mass") {
  CHECK(score_article(ProbabilityTriple::ingest(1, 0, 0)) == doctest::Approx(1.0));
  CHECK(score_article(ProbabilityTriple::ingest(1.0 / 3, 1.0 / 3, 1.0 / 3)) ==
        doctest::Approx(0.0));
  CHECK(score_article(ProbabilityTriple::ingest(0.7, 0.1, 0.2)) == doctest::Approx(0.6));
}

TEST_CASE("score is antisymmetric under polarity swap") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    double a = u(rng), b = u(rng), c = u(rng);
    const double s = a + b + c;
    a /= s;
    b /= s;
    c /= s;
    const auto p = ProbabilityTriple::ingest(a, b, c);
    const auto swapped = ProbabilityTriple::ingest(b, a, c);
    CHECK(score_article(p) == doctest::Approx(-score_article(swapped)));
  }
}

TEST_CASE("probability ingest renormalizes small drift and rejects large") {
  const auto p = ProbabilityTriple::ingest(0.5 + 3e-7, 0.3, 0.2);
  CHECK(p.p_pos + p.p_neg + p.p_neu == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(ProbabilityTriple::ingest(0.6, 0.3, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(ProbabilityTriple::ingest(-0.1, 0.6, 0.5), std::invalid_argument);
}

TEST_CASE("timestamp parsing handles dates, times, offsets") {
  CHECK(parse_instant("1970-01-01") == 0);
  CHECK(parse_instant("1970-01-02T00:00:00Z") == 86400);
  CHECK(parse_instant("2025-01-01T12:00:00+02:00") == parse_instant("2025-01-01T10:00:00Z"));
  CHECK(parse_instant("2025-01-01T10:00:00.75Z") == parse_instant("2025-01-01T10:00:00Z"));
  CHECK(format_instant(parse_instant("2025-06-30T23:59:59Z")) == "2025-06-30T23:59:59Z");
  CHECK_THROWS_AS(parse_instant("not a date"), std::invalid_argument);
  CHECK_THROWS_AS(parse_instant("2025-13-01"), std::invalid_argument);
}

TEST_CASE("daily grid spans the horizon with one bin per day") {
  const auto g = build_grid(parse_instant("2025-01-01"), parse_instant("2025-01-15"),
                            GridFrequency::daily);
  CHECK(g.size() == 14);
  CHECK(g.bin_start(0) == parse_instant("2025-01-01"));
  CHECK(g.bin_end(13) == parse_instant("2025-01-15"));
}

TEST_CASE("empty horizon is rejected") {
  CHECK_THROWS_AS(build_grid(parse_instant("2025-01-01"), parse_instant("2025-01-01"),
                             GridFrequency::weekly),
                  std::invalid_argument);
}

namespace {

// Independent calendar-walk oracle: counts weekly bins by walking days and
// starting a new bin at every boundary day (the day after the anchor).
int weekly_bin_count_oracle(Instant start, Instant end, Weekday anchor) {
  const int boundary = (static_cast<int>(anchor) + 1) % 7;
  int bins = 1;
  for (std::int64_t day = start / kSecondsPerDay + 1; day * kSecondsPerDay < end; ++day)
    if (static_cast<int>(weekday_of_day(day)) == boundary &&
        day * kSecondsPerDay > start)
      ++bins;
  return bins;
}

}  // namespace

TEST_CASE("weekly Friday grid matches the calendar-walk oracle") {
  const Instant start = parse_instant("2024-11-01");
  const Instant end = parse_instant("2026-02-28");
  const auto g = build_grid(start, end, GridFrequency::weekly, Weekday::friday);
  CHECK(static_cast<int>(g.size()) == weekly_bin_count_oracle(start, end, Weekday::friday));
  // Interior right edges land on the Friday/Saturday midnight boundary.
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    const Instant edge = g.bin_end(k);
    CHECK(edge % kSecondsPerDay == 0);
    CHECK(weekday_of_day(edge / kSecondsPerDay) == Weekday::saturday);
    CHECK(weekday_of_day(edge / kSecondsPerDay - 1) == Weekday::friday);
  }
  CHECK(g.bin_end(g.size() - 1) == end);
}

TEST_CASE("grid bins reconstruct the horizon exactly") {
  for (GridFrequency f : {GridFrequency::daily, GridFrequency::weekly, GridFrequency::monthly,
                          GridFrequency::quarterly}) {
    const auto g = build_grid(parse_instant("2024-11-05T07:00:00Z"),
                              parse_instant("2025-08-20T13:30:00Z"), f);
    CHECK(g.edges.front() == g.start);
    CHECK(g.edges.back() == g.end);
    for (std::size_t i = 1; i < g.edges.size(); ++i) CHECK(g.edges[i] > g.edges[i - 1]);
  }
}

TEST_CASE("half-open bins: left edge in, right edge in the next bin") {
  const auto g = build_grid(parse_instant("2025-01-06"), parse_instant("2025-02-03"),
                            GridFrequency::daily);
  Article a;
  a.entity_id = "E";
  a.probs = ProbabilityTriple::ingest(0.5, 0.3, 0.2);
  a.timestamp = g.bin_start(3);
  Article b = a;
  b.timestamp = g.bin_end(3);
  const auto bins = assign_bins(std::vector<Article>{a, b}, g);
  CHECK(bins.counts[3] == 1);
  CHECK(bins.counts[4] == 1);
}

TEST_CASE("bin assignment partitions in-horizon articles") {
  const auto g = build_grid(parse_instant("2025-01-03"), parse_instant("2025-06-27"),
                            GridFrequency::weekly);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Instant> pick(g.start, g.end - 1);
  std::vector<Article> articles(100);
  for (auto& a : articles) {
    a.entity_id = "E";
    a.probs = ProbabilityTriple::ingest(0.4, 0.4, 0.2);
    a.timestamp = pick(rng);
  }
  const auto bins = assign_bins(articles, g);
  int total = 0;
  std::set<std::size_t> seen;
  for (std::size_t k = 0; k < bins.members.size(); ++k) {
    total += bins.counts[k];
    for (std::size_t idx : bins.members[k]) CHECK(seen.insert(idx).second);
  }
  CHECK(total == 100);
  CHECK(bins.n_rejected == 0);
}

TEST_CASE("out-of-horizon articles warn or throw under strict mode") {
  const auto g = build_grid(parse_instant("2025-01-03"), parse_instant("2025-01-31"),
                            GridFrequency::weekly);
  Article a;
  a.entity_id = "E";
  a.probs = ProbabilityTriple::ingest(0.4, 0.4, 0.2);
  a.timestamp = parse_instant("2026-01-01");
  const auto bins = assign_bins(std::vector<Article>{a}, g, false);
  CHECK(bins.n_rejected == 1);
  CHECK_THROWS_AS(assign_bins(std::vector<Article>{a}, g, true), std::runtime_error);
}
