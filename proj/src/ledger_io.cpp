#include "arbminer/ledger_io.hpp"

#include "arbminer/csv.hpp"
#include "arbminer/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

namespace arbminer {

namespace {

const std::vector<std::string> kColumns15 = {
    "Trade_Id", "Date",      "User_Id",        "Japan",         "Type",        "Currency",
    "Bitcoins", "Money",     "Money_Rate",     "Money_JPY",     "Money_Fee",   "Money_Fee_Rate",
    "Money_Fee_JPY", "Bitcoin_Fee", "Bitcoin_Fee_JPY"};

const std::vector<std::string> kColumns19 = [] {
  auto c = kColumns15;
  for (const char* extra : {"User", "User_Id_Hash", "User_Country", "User_State"}) c.push_back(extra);
  return c;
}();

const std::vector<std::string> kPublicColumns = {"Trade_Id", "Date", "Currency", "Amount",
                                                 "Price", "Order_Kind", "Initiator"};

std::optional<std::string> optional_text(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

struct RowParser {
  std::size_t line;
  std::vector<RowError>& errors;
  bool ok = true;

  void fail(std::string code, std::string detail) {
    if (ok) errors.push_back({line, std::move(code), std::move(detail)});
    ok = false;
  }

  Decimal decimal(const std::string& field, std::string_view column) {
    auto d = Decimal::parse(field);
    if (!d) {
      fail("BadDecimal", std::string(column) + "='" + field + "'");
      return Decimal{};
    }
    return *d;
  }
};

bool same_column_set(const CsvHeader& header, const std::vector<std::string>& expected) {
  if (header.size() != expected.size()) return false;
  std::set<std::string> a, b;
  for (const auto& n : header.names()) a.insert(lower(n));
  for (const auto& n : expected) b.insert(lower(n));
  return a == b;
}

} // namespace

std::string_view to_string(FormatFamily f) {
  switch (f) {
  case FormatFamily::April2011: return "April2011";
  case FormatFamily::May11ToOct12: return "May11ToOct12";
  case FormatFamily::Nov12ToNov13: return "Nov12ToNov13";
  default: return "July2012Exception";
  }
}

std::optional<FormatFamily> parse_family(std::string_view s) {
  for (auto f : {FormatFamily::April2011, FormatFamily::May11ToOct12, FormatFamily::Nov12ToNov13,
                 FormatFamily::July2012Exception})
    if (lower(to_string(f)) == lower(s)) return f;
  return std::nullopt;
}

std::optional<FormatFamily> family_for_month(int year, unsigned month) {
  if (month < 1 || month > 12) return std::nullopt;
  int key = year * 100 + static_cast<int>(month);
  if (key < 201104 || key > 201311) return std::nullopt;
  if (key == 201104) return FormatFamily::April2011;
  if (key == 201207) return FormatFamily::July2012Exception;
  if (key <= 201210) return FormatFamily::May11ToOct12;
  return FormatFamily::Nov12ToNov13;
}

std::optional<FormatFamily> family_for_path(const std::filesystem::path& path) {
  std::string stem = path.filename().string();
  if (stem.size() < 7 || stem[4] != '-') return std::nullopt;
  int year = 0;
  unsigned month = 0;
  auto r1 = std::from_chars(stem.data(), stem.data() + 4, year);
  auto r2 = std::from_chars(stem.data() + 5, stem.data() + 7, month);
  if (r1.ec != std::errc{} || r2.ec != std::errc{} || r1.ptr != stem.data() + 4 || r2.ptr != stem.data() + 7)
    return std::nullopt;
  return family_for_month(year, month);
}

const std::vector<std::string>& leaked_columns(FormatFamily f) {
  return f == FormatFamily::Nov12ToNov13 ? kColumns19 : kColumns15;
}

McKind scheme_of(FormatFamily f) {
  switch (f) {
  case FormatFamily::April2011: return McKind::Standard;
  case FormatFamily::May11ToOct12: return McKind::Tibanne;
  default: return McKind::THK;
  }
}

std::optional<MicroInstant> decode_trade_id_time(std::string_view id) {
  if (id.size() != 16) return std::nullopt;
  for (char c : id)
    if (c < '0' || c > '9') return std::nullopt;
  long long secs = 0, micros = 0;
  std::from_chars(id.data(), id.data() + 10, secs);
  std::from_chars(id.data() + 10, id.data() + 16, micros);
  return MicroInstant{std::chrono::seconds{secs} + std::chrono::microseconds{micros}};
}

Parsed<Leg> parse_leaked_file(std::istream& in, FormatFamily family) {
  Parsed<Leg> out;
  std::string line;
  if (!read_line(in, line)) throw format_error("UnknownColumnSet", "empty leaked file");
  CsvHeader header(split_csv_line(line));
  const auto& cols = leaked_columns(family);
  if (!same_column_set(header, cols))
    throw format_error("UnknownColumnSet", "header does not match family " + std::string(to_string(family)) + ": " + line);
  std::vector<std::size_t> pos;
  for (const auto& c : cols) pos.push_back(header.at(c));
  const bool wide = cols.size() == kColumns19.size();
  const McKind scheme = scheme_of(family);

  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    RowParser p{line_no, out.errors};
    if (f.size() != header.size()) {
      p.fail("BadRow", "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(f.size()));
      continue;
    }
    auto get = [&](std::size_t k) -> const std::string& { return f[pos[k]]; };
    Leg leg;
    leg.source_row = line_no;
    leg.trade_id = get(0);
    if (leg.trade_id.empty()) p.fail("BadTradeId", "empty Trade_Id");
    if (auto t = parse_datetime(get(1))) leg.timestamp = *t;
    else p.fail("BadDate", "Date='" + get(1) + "'");
    if (auto u = parse_user_id(get(2))) leg.user_id = *u;
    else p.fail("BadUserId", "User_Id='" + get(2) + "'");
    if (get(3) == "JP") leg.japan = JapanFlag::JP;
    else if (get(3) == "NJP") leg.japan = JapanFlag::NJP;
    else if (get(3).empty()) leg.japan = JapanFlag::Unknown;
    else p.fail("BadEnumValue", "Japan='" + get(3) + "'");
    if (auto s = parse_side(get(4))) leg.side = *s;
    else p.fail("BadEnumValue", "Type='" + get(4) + "'");
    if (auto c = parse_currency(get(5))) leg.currency = *c;
    else p.fail("BadEnumValue", "Currency='" + get(5) + "'");
    leg.bitcoins = p.decimal(get(6), "Bitcoins");
    leg.money = p.decimal(get(7), "Money");
    leg.money_rate = p.decimal(get(8), "Money_Rate");
    leg.money_jpy = p.decimal(get(9), "Money_JPY");
    leg.money_fee = p.decimal(get(10), "Money_Fee");
    leg.money_fee_rate = p.decimal(get(11), "Money_Fee_Rate");
    leg.money_fee_jpy = p.decimal(get(12), "Money_Fee_JPY");
    leg.bitcoin_fee = p.decimal(get(13), "Bitcoin_Fee");
    leg.bitcoin_fee_jpy = p.decimal(get(14), "Bitcoin_Fee_JPY");
    if (wide) {
      leg.user_hex = optional_text(get(15));
      leg.user_id_hash = optional_text(get(16));
      leg.user_country = optional_text(get(17));
      leg.user_state = optional_text(get(18));
    }
    if (leg.is_intermediary()) {
      McKind kind = leg.user_id == kTibanneUser ? McKind::Tibanne : McKind::THK;
      if (kind != scheme)
        p.fail("UnexpectedIntermediary", user_id_text(leg.user_id) + " in " + std::string(to_string(family)) + " file");
    }
    if (p.ok) out.records.push_back(std::move(leg));
  }

  if (scheme != McKind::Standard) {
    std::unordered_map<std::string, bool> multi;
    for (const auto& l : out.records)
      if (l.is_intermediary()) multi[l.trade_id] = true;
    for (auto& l : out.records)
      if (multi.count(l.trade_id)) l.mc_kind = scheme;
  }
  return out;
}

void write_leaked_file(std::ostream& out, std::span<const Leg> legs, FormatFamily family) {
  const auto& cols = leaked_columns(family);
  out << join_csv(cols) << "\n";
  const bool wide = cols.size() == kColumns19.size();
  for (const auto& l : legs) {
    std::vector<std::string> f = {l.trade_id,
                                  format_datetime(l.timestamp),
                                  user_id_text(l.user_id),
                                  std::string(to_string(l.japan)),
                                  std::string(to_string(l.side)),
                                  std::string(to_string(l.currency)),
                                  l.bitcoins.to_string(),
                                  l.money.to_string(),
                                  l.money_rate.to_string(),
                                  l.money_jpy.to_string(),
                                  l.money_fee.to_string(),
                                  l.money_fee_rate.to_string(),
                                  l.money_fee_jpy.to_string(),
                                  l.bitcoin_fee.to_string(),
                                  l.bitcoin_fee_jpy.to_string()};
    if (wide) {
      f.push_back(l.user_hex.value_or(""));
      f.push_back(l.user_id_hash.value_or(""));
      f.push_back(l.user_country.value_or(""));
      f.push_back(l.user_state.value_or(""));
    }
    out << join_csv(f) << "\n";
  }
}

Parsed<PublicTradeRecord> parse_public_file(std::istream& in) {
  Parsed<PublicTradeRecord> out;
  std::string line;
  if (!read_line(in, line)) throw format_error("UnknownColumnSet", "empty public trade file");
  CsvHeader header(split_csv_line(line));
  if (!same_column_set(header, kPublicColumns))
    throw format_error("UnknownColumnSet", "unexpected public trade header: " + line);
  std::vector<std::size_t> pos;
  for (const auto& c : kPublicColumns) pos.push_back(header.at(c));
  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    RowParser p{line_no, out.errors};
    if (f.size() != header.size()) {
      p.fail("BadRow", "wrong field count");
      continue;
    }
    auto get = [&](std::size_t k) -> const std::string& { return f[pos[k]]; };
    PublicTradeRecord r;
    r.trade_id = get(0);
    if (auto t = parse_datetime(get(1))) r.timestamp = *t;
    else p.fail("BadDate", "Date='" + get(1) + "'");
    if (auto c = parse_currency(get(2))) r.currency = *c;
    else p.fail("BadEnumValue", get(2));
    r.amount = p.decimal(get(3), "Amount");
    r.price = p.decimal(get(4), "Price");
    if (auto k = parse_order_kind(get(5))) r.order_kind = *k;
    else p.fail("BadEnumValue", get(5));
    if (auto i = parse_initiator(get(6))) r.initiator = *i;
    else p.fail("BadEnumValue", get(6));
    if (p.ok) out.records.push_back(std::move(r));
  }
  return out;
}

void write_public_file(std::ostream& out, std::span<const PublicTradeRecord> records) {
  out << join_csv(kPublicColumns) << "\n";
  for (const auto& r : records)
    out << join_csv({r.trade_id, format_datetime(r.timestamp), std::string(to_string(r.currency)),
                     r.amount.to_string(), r.price.to_string(), std::string(to_string(r.order_kind)),
                     std::string(to_string(r.initiator))})
        << "\n";
}

namespace {

std::optional<Instant> parse_rate_time(const std::string& s) {
  if (auto t = parse_datetime(s)) return t;
  // histdata style: YYYYMMDD hhmmss
  if (s.size() == 15 && s[8] == ' ') {
    std::string iso = s.substr(0, 4) + "-" + s.substr(4, 2) + "-" + s.substr(6, 2) + " " + s.substr(9, 2) + ":" +
                      s.substr(11, 2) + ":" + s.substr(13, 2);
    return parse_datetime(iso);
  }
  return std::nullopt;
}

} // namespace

std::vector<RateBar> parse_rate_file(std::istream& in, Currency base, Currency quote) {
  std::map<Instant, double> bars;
  std::string line;
  std::size_t line_no = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    char sep = line.find(';') != std::string::npos ? ';' : ',';
    auto f = split_csv_line(line, sep);
    auto t = f.empty() ? std::nullopt : parse_rate_time(f[0]);
    if (!t) {
      if (line_no == 1) continue; // header
      throw format_error("BadDate", "rate file line " + std::to_string(line_no));
    }
    if (f.size() < 2) throw format_error("BadRow", "rate file line " + std::to_string(line_no));
    double open = 0;
    auto res = std::from_chars(f[1].data(), f[1].data() + f[1].size(), open);
    if (res.ec != std::errc{}) throw format_error("BadDecimal", "rate file line " + std::to_string(line_no));
    if (!std::isfinite(open) || open <= 0)
      throw format_error("NonPositiveRate", "rate file line " + std::to_string(line_no));
    Instant hour = hour_floor(*t);
    if (!bars.emplace(hour, open).second)
      throw format_error("DuplicateHour", format_datetime(hour) + " at line " + std::to_string(line_no));
  }
  std::vector<RateBar> out;
  out.reserve(bars.size());
  for (auto [h, o] : bars) out.push_back({base, quote, h, o});
  return out;
}

void write_rate_file(std::ostream& out, std::span<const RateBar> bars) {
  out << "Time,Open,High,Low,Close\n";
  for (const auto& b : bars) {
    std::string o = format_double(b.open);
    out << format_datetime(b.hour) << "," << o << "," << o << "," << o << "," << o << "\n";
  }
}

std::optional<std::pair<Currency, Currency>> dyad_for_rate_path(const std::filesystem::path& path) {
  std::string stem = path.stem().string();
  if (stem.size() != 6) return std::nullopt;
  auto a = parse_currency(stem.substr(0, 3));
  auto b = parse_currency(stem.substr(3, 3));
  if (!a || !b || *a == *b) return std::nullopt;
  return std::make_pair(*a, *b);
}

std::vector<DailyVolume> parse_daily_volume_file(std::istream& in) {
  std::vector<DailyVolume> out;
  std::string line;
  std::size_t line_no = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    auto d = f.empty() ? std::nullopt : parse_date(f[0]);
    if (!d) {
      if (line_no == 1) continue;
      throw format_error("BadDate", "volume file line " + std::to_string(line_no));
    }
    if (f.size() < 2) throw format_error("BadRow", "volume file line " + std::to_string(line_no));
    out.push_back({*d, parse_double(f[1], "volume")});
  }
  return out;
}

void write_daily_volume_file(std::ostream& out, std::span<const DailyVolume> rows) {
  out << "Date,Volume\n";
  for (const auto& r : rows) out << format_date(r.day) << "," << format_double(r.volume) << "\n";
}

} // namespace arbminer
