#pragma once

#include "arbminer/ledger.hpp"

#include <chrono>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace arbminer {

enum class FormatFamily { April2011, May11ToOct12, Nov12ToNov13, July2012Exception };

std::string_view to_string(FormatFamily f);
std::optional<FormatFamily> parse_family(std::string_view s);
std::optional<FormatFamily> family_for_month(int year, unsigned month);
// Leaked files are named after their month: "2012-03.csv", "2012-03_part2.csv", ...
std::optional<FormatFamily> family_for_path(const std::filesystem::path& path);
const std::vector<std::string>& leaked_columns(FormatFamily f);
McKind scheme_of(FormatFamily f);

// 10-digit epoch seconds followed by 6 microsecond digits; none otherwise.
using MicroInstant = std::chrono::sys_time<std::chrono::microseconds>;
std::optional<MicroInstant> decode_trade_id_time(std::string_view trade_id);

struct RowError {
  std::size_t line = 0; // 1-based, header is line 1
  std::string code;
  std::string detail;
};

template <class T>
struct Parsed {
  std::vector<T> records;
  std::vector<RowError> errors;
};

// Throws UnknownColumnSet when the header does not carry the family's columns.
// Row-level problems are collected and parsing continues.
Parsed<Leg> parse_leaked_file(std::istream& in, FormatFamily family);
void write_leaked_file(std::ostream& out, std::span<const Leg> legs, FormatFamily family);

Parsed<PublicTradeRecord> parse_public_file(std::istream& in);
void write_public_file(std::ostream& out, std::span<const PublicTradeRecord> records);

// Hourly OHLC rows ("YYYY-MM-DD hh:mm:ss" or "YYYYMMDD hhmmss", ',' or ';').
// Only the open is kept. Throws DuplicateHour / NonPositiveRate / BadDate.
std::vector<RateBar> parse_rate_file(std::istream& in, Currency base, Currency quote);
void write_rate_file(std::ostream& out, std::span<const RateBar> bars);
// "EURUSD.csv" -> (EUR, USD)
std::optional<std::pair<Currency, Currency>> dyad_for_rate_path(const std::filesystem::path& path);

std::vector<DailyVolume> parse_daily_volume_file(std::istream& in);
void write_daily_volume_file(std::ostream& out, std::span<const DailyVolume> rows);

} // namespace arbminer
