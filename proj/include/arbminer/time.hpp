#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace arbminer {

using Instant = std::chrono::sys_seconds;
using Day = std::chrono::sys_days;

// "YYYY-MM-DD hh:mm:ss", UTC. A 'T' separator is accepted as well.
std::optional<Instant> parse_datetime(std::string_view text);
// "YYYY-MM-DD".
std::optional<Day> parse_date(std::string_view text);
std::string format_datetime(Instant t);
std::string format_date(Day d);

Instant make_instant(int year, unsigned month, unsigned day, int hour = 0, int minute = 0, int second = 0);
Day make_day(int year, unsigned month, unsigned day);

inline Instant hour_floor(Instant t) { return std::chrono::floor<std::chrono::hours>(t); }
inline Day day_of(Instant t) { return std::chrono::floor<std::chrono::days>(t); }
inline std::int64_t epoch_seconds(Instant t) { return t.time_since_epoch().count(); }
inline std::int64_t epoch_hours(Instant t) {
  return std::chrono::floor<std::chrono::hours>(t).time_since_epoch().count();
}
inline Instant from_epoch_seconds(std::int64_t s) { return Instant{std::chrono::seconds{s}}; }

} // namespace arbminer
