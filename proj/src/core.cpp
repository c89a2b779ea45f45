#include "sentio/core.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sentio {

namespace {

bool parse_int(std::string_view s, int& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

[[noreturn]] void bad_timestamp(std::string_view text) {
  throw std::invalid_argument("unparseable timestamp: '" + std::string(text) + "'");
}

}  // namespace

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  // Howard Hinnant's civil-date algorithm.
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, unsigned& month, unsigned& day) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = doy - (153 * mp + 2) / 5 + 1;
  month = mp + (mp < 10 ? 3 : -9);
  year = static_cast<int>(y + (month <= 2));
}

Weekday weekday_of_day(std::int64_t days) {
  // 1970-01-01 was a Thursday.
  std::int64_t w = (days + 4) % 7;
  if (w < 0) w += 7;
  return static_cast<Weekday>(w);
}

Instant parse_instant(std::string_view text) {
  // Trim surrounding whitespace.
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.size() < 10) bad_timestamp(text);

  int y = 0, mo = 0, dy = 0;
  if (text[4] != '-' || text[7] != '-' || !parse_int(text.substr(0, 4), y) ||
      !parse_int(text.substr(5, 2), mo) || !parse_int(text.substr(8, 2), dy))
    bad_timestamp(text);
  if (mo < 1 || mo > 12 || dy < 1 || dy > 31) bad_timestamp(text);

  std::int64_t secs = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(dy)) * kSecondsPerDay;
  std::string_view rest = text.substr(10);
  if (rest.empty()) return secs;

  if (rest.front() != 'T' && rest.front() != 't' && rest.front() != ' ') bad_timestamp(text);
  rest.remove_prefix(1);
  if (rest.size() < 8 || rest[2] != ':' || rest[5] != ':') bad_timestamp(text);
  int hh = 0, mi = 0, ss = 0;
  if (!parse_int(rest.substr(0, 2), hh) || !parse_int(rest.substr(3, 2), mi) ||
      !parse_int(rest.substr(6, 2), ss))
    bad_timestamp(text);
  if (hh > 23 || mi > 59 || ss > 60) bad_timestamp(text);
  secs += hh * 3600 + mi * 60 + ss;
  rest.remove_prefix(8);

  // Fractional seconds: truncate.
  if (!rest.empty() && rest.front() == '.') {
    rest.remove_prefix(1);
    while (!rest.empty() && std::isdigit(static_cast<unsigned char>(rest.front()))) rest.remove_prefix(1);
  }
  if (rest.empty()) return secs;
  if (rest == "Z" || rest == "z") return secs;

  // Numeric offset: +HH:MM / -HH:MM / +HHMM.
  if (rest.front() != '+' && rest.front() != '-') bad_timestamp(text);
  const int sign = rest.front() == '+' ? 1 : -1;
  rest.remove_prefix(1);
  int oh = 0, om = 0;
  if (rest.size() == 5 && rest[2] == ':') {
    if (!parse_int(rest.substr(0, 2), oh) || !parse_int(rest.substr(3, 2), om)) bad_timestamp(text);
  } else if (rest.size() == 4) {
    if (!parse_int(rest.substr(0, 2), oh) || !parse_int(rest.substr(2, 2), om)) bad_timestamp(text);
  } else if (rest.size() == 2) {
    if (!parse_int(rest, oh)) bad_timestamp(text);
  } else {
    bad_timestamp(text);
  }
  return secs - sign * (oh * 3600 + om * 60);
}

std::string format_instant(Instant t) {
  std::int64_t days = t >= 0 ? t / kSecondsPerDay : (t - kSecondsPerDay + 1) / kSecondsPerDay;
  std::int64_t sod = t - days * kSecondsPerDay;
  int y;
  unsigned mo, dy;
  civil_from_days(days, y, mo, dy);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", y, mo, dy,
                static_cast<int>(sod / 3600), static_cast<int>((sod / 60) % 60),
                static_cast<int>(sod % 60));
  return buf;
}

std::string format_date(Instant t) {
  std::int64_t days = t >= 0 ? t / kSecondsPerDay : (t - kSecondsPerDay + 1) / kSecondsPerDay;
  int y;
  unsigned mo, dy;
  civil_from_days(days, y, mo, dy);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, mo, dy);
  return buf;
}

namespace {
constexpr std::array<std::string_view, 7> kWeekdayNames = {
    "sunday", "monday", "tuesday", "wednesday", "thursday", "friday", "saturday"};
}

std::optional<Weekday> parse_weekday(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (std::size_t i = 0; i < kWeekdayNames.size(); ++i)
    if (lower == kWeekdayNames[i]) return static_cast<Weekday>(i);
  return std::nullopt;
}

std::string_view weekday_name(Weekday d) { return kWeekdayNames[static_cast<int>(d)]; }

std::string_view frequency_name(GridFrequency f) {
  switch (f) {
    case GridFrequency::daily: return "daily";
    case GridFrequency::weekly: return "weekly";
    case GridFrequency::monthly: return "monthly";
    case GridFrequency::quarterly: return "quarterly";
  }
  return "?";
}

std::optional<GridFrequency> parse_frequency(std::string_view name) {
  if (name == "daily") return GridFrequency::daily;
  if (name == "weekly") return GridFrequency::weekly;
  if (name == "monthly") return GridFrequency::monthly;
  if (name == "quarterly") return GridFrequency::quarterly;
  return std::nullopt;
}

ProbabilityTriple ProbabilityTriple::ingest(double pos, double neg, double neu) {
  for (double v : {pos, neg, neu}) {
    if (!(v >= -1e-9)) throw std::invalid_argument("probability component negative");
    if (!(v <= 1.0 + 1e-6)) throw std::invalid_argument("probability component exceeds 1");
  }
  pos = std::clamp(pos, 0.0, 1.0);
  neg = std::clamp(neg, 0.0, 1.0);
  neu = std::clamp(neu, 0.0, 1.0);
  const double sum = pos + neg + neu;
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::invalid_argument("probability triple sums to " + std::to_string(sum) +
                                ", outside the 1e-6 ingest tolerance");
  ProbabilityTriple t;
  t.p_pos = pos / sum;
  t.p_neg = neg / sum;
  t.p_neu = neu / sum;
  return t;
}

namespace {

// Day index of the start-of-period boundary <= the given day.
std::int64_t floor_boundary_day(std::int64_t day, GridFrequency f, Weekday anchor) {
  switch (f) {
    case GridFrequency::daily:
      return day;
    case GridFrequency::weekly: {
      // Weeks end on the anchor weekday; the boundary is the start of the
      // following day.
      const int boundary_wd = (static_cast<int>(anchor) + 1) % 7;
      std::int64_t d = day;
      while (static_cast<int>(weekday_of_day(d)) != boundary_wd) --d;
      return d;
    }
    case GridFrequency::monthly: {
      int y;
      unsigned m, dd;
      civil_from_days(day, y, m, dd);
      return days_from_civil(y, m, 1);
    }
    case GridFrequency::quarterly: {
      int y;
      unsigned m, dd;
      civil_from_days(day, y, m, dd);
      const unsigned qm = 1 + 3 * ((m - 1) / 3);
      return days_from_civil(y, qm, 1);
    }
  }
  return day;
}

std::int64_t next_boundary_day(std::int64_t day, GridFrequency f, Weekday anchor) {
  switch (f) {
    case GridFrequency::daily:
      return day + 1;
    case GridFrequency::weekly:
      return floor_boundary_day(day, f, anchor) + 7;
    case GridFrequency::monthly: {
      int y;
      unsigned m, dd;
      civil_from_days(day, y, m, dd);
      if (m == 12) return days_from_civil(y + 1, 1, 1);
      return days_from_civil(y, m + 1, 1);
    }
    case GridFrequency::quarterly: {
      int y;
      unsigned m, dd;
      civil_from_days(day, y, m, dd);
      unsigned qm = 1 + 3 * ((m - 1) / 3) + 3;
      if (qm > 12) return days_from_civil(y + 1, 1, 1);
      return days_from_civil(y, qm, 1);
    }
  }
  return day + 1;
}

}  // namespace

Instant floor_to_boundary(Instant t, GridFrequency f, Weekday anchor) {
  std::int64_t day = t >= 0 ? t / kSecondsPerDay : (t - kSecondsPerDay + 1) / kSecondsPerDay;
  return floor_boundary_day(day, f, anchor) * kSecondsPerDay;
}

Instant next_boundary(Instant t, GridFrequency f, Weekday anchor) {
  Instant b = floor_to_boundary(t, f, anchor);
  std::int64_t day = b / kSecondsPerDay;
  while (b <= t) {
    day = next_boundary_day(day, f, anchor);
    b = day * kSecondsPerDay;
  }
  return b;
}

GridSpec build_grid(Instant start, Instant end, GridFrequency frequency, Weekday anchor) {
  if (start >= end) throw std::invalid_argument("empty grid horizon");
  GridSpec g;
  g.start = start;
  g.end = end;
  g.frequency = frequency;
  g.anchor = anchor;
  g.edges.push_back(start);
  Instant b = next_boundary(start, frequency, anchor);
  while (b < end) {
    g.edges.push_back(b);
    b = next_boundary(b, frequency, anchor);
  }
  g.edges.push_back(end);
  return g;
}

std::optional<std::size_t> GridSpec::bin_of(Instant t) const {
  if (edges.size() < 2 || t < edges.front() || t >= edges.back()) return std::nullopt;
  auto it = std::upper_bound(edges.begin(), edges.end(), t);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::aggregated: return "aggregated";
    case Stage::filled: return "filled";
    case Stage::smoothed: return "smoothed";
  }
  return "?";
}

BinAssignment assign_bins(std::span<const Article> articles, const GridSpec& grid, bool strict) {
  BinAssignment out;
  out.members.resize(grid.size());
  out.counts.assign(grid.size(), 0);
  for (std::size_t i = 0; i < articles.size(); ++i) {
    auto k = grid.bin_of(articles[i].timestamp);
    if (!k) {
      if (strict)
        throw std::runtime_error("article timestamp " + format_instant(articles[i].timestamp) +
                                 " outside grid horizon");
      ++out.n_rejected;
      continue;
    }
    out.members[*k].push_back(i);
    ++out.counts[*k];
  }
  return out;
}

}  // namespace sentio
