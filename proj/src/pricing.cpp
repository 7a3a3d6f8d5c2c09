#include "arbminer/pricing.hpp"

#include "arbminer/csv.hpp"
#include "arbminer/error.hpp"
#include "arbminer/ledger_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace arbminer {

std::string_view to_string(FeeRegime r) {
  switch (r) {
  case FeeRegime::None: return "none";
  case FeeRegime::Actual: return "actual";
  default: return "expected";
  }
}

std::optional<FeeRegime> parse_fee_regime(std::string_view s) {
  for (auto r : {FeeRegime::None, FeeRegime::Actual, FeeRegime::Expected})
    if (to_string(r) == lower(s)) return r;
  return std::nullopt;
}

void RateTable::add(const RateBar& bar) {
  if (!(bar.open > 0)) throw format_error("NonPositiveRate", "rate bar at " + format_datetime(bar.hour));
  auto& s = series_[{bar.base, bar.quote}];
  if (!s.emplace(epoch_hours(bar.hour), bar.open).second)
    throw format_error("DuplicateHour", std::string(to_string(bar.base)) + std::string(to_string(bar.quote)) + " " +
                                            format_datetime(bar.hour));
}

void RateTable::add_series(std::span<const RateBar> bars) {
  for (const auto& b : bars) add(b);
}

RateTable RateTable::load_directory(const std::filesystem::path& dir) {
  RateTable t;
  if (!std::filesystem::is_directory(dir)) throw format_error("FileNotFound", "rate directory " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && dyad_for_rate_path(e.path())) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto [base, quote] = *dyad_for_rate_path(f);
    std::ifstream in(f);
    t.add_series(parse_rate_file(in, base, quote));
  }
  return t;
}

bool RateTable::has_series(Currency base, Currency quote) const { return series_.count({base, quote}) > 0; }

std::optional<double> RateTable::open(Currency base, Currency quote, Instant hour) const {
  auto it = series_.find({base, quote});
  if (it == series_.end()) return std::nullopt;
  auto jt = it->second.find(epoch_hours(hour));
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

namespace {

std::optional<double> direct_or_inverse(const RateTable& t, Currency buy, Currency sell, Instant hour, bool& present) {
  if (t.has_series(buy, sell)) {
    present = true;
    return t.open(buy, sell, hour);
  }
  if (t.has_series(sell, buy)) {
    present = true;
    auto r = t.open(sell, buy, hour);
    if (!r) return std::nullopt;
    return 1.0 / *r;
  }
  present = false;
  return std::nullopt;
}

} // namespace

std::optional<double> RateTable::official_rate(Currency buy, Currency sell, Instant hour) const {
  if (buy == sell) return 1.0;
  bool present = false;
  auto r = direct_or_inverse(*this, buy, sell, hour, present);
  if (present || buy == Currency::USD || sell == Currency::USD) return r;
  bool p1 = false, p2 = false;
  auto a = direct_or_inverse(*this, buy, Currency::USD, hour, p1);
  auto b = direct_or_inverse(*this, Currency::USD, sell, hour, p2);
  if (!a || !b) return std::nullopt;
  return *a * *b;
}

std::optional<double> RateTable::delta_r(const Dyad& dyad, Instant hour) const {
  auto now = official_rate(dyad.first, dyad.second, hour);
  auto before = official_rate(dyad.first, dyad.second, hour - std::chrono::hours{1});
  if (!now || !before) return std::nullopt;
  return std::fabs(*now - *before) / *before * 100.0;
}

std::vector<RateBar> RateTable::bars() const {
  std::vector<RateBar> out;
  for (const auto& [k, s] : series_)
    for (auto [h, o] : s) out.push_back({k.first, k.second, Instant{std::chrono::hours{h}}, o});
  return out;
}

double implied_rate(const Leg& buy, const Leg& sell, FeeRegime regime, FeeSign sign) {
  const double fiat_s = sell.money.to_double();
  const double btc_s = sell.bitcoins.to_double();
  const double fiat_b = buy.money.to_double();
  const double btc_b = buy.bitcoins.to_double();
  double ff_s = 0, bf_s = 0, ff_b = 0, bf_b = 0;
  if (regime == FeeRegime::Actual) {
    ff_s = sell.money_fee.to_double();
    bf_s = sell.bitcoin_fee.to_double();
    ff_b = buy.money_fee.to_double();
    bf_b = buy.bitcoin_fee.to_double();
  } else if (regime == FeeRegime::Expected) {
    if (!buy.expected_fee_pct || !sell.expected_fee_pct)
      throw numerical_error("MissingExpectedFee", "leg without expected fee");
    // The buyer pays in bitcoin, the seller in fiat.
    bf_b = *buy.expected_fee_pct / 100.0 * btc_b;
    ff_s = *sell.expected_fee_pct / 100.0 * fiat_s;
  }
  double num_s = fiat_s - ff_s, den_s = btc_s + bf_s, num_b = 0, den_b = 0;
  if (sign == FeeSign::Economic) {
    num_b = btc_b - bf_b;
    den_b = fiat_b + ff_b;
  } else {
    num_b = btc_b + ff_b;
    den_b = fiat_b - bf_b;
  }
  if (!(den_s > 0) || !(den_b > 0) || !(btc_s > 0) || !(fiat_b > 0))
    throw numerical_error("DegenerateLeg", "non-positive denominator for trades " + buy.trade_id + "/" + sell.trade_id);
  return (num_s / den_s) * (num_b / den_b);
}

double spread_pct(double implied, double official) { return (implied - official) / official * 100.0; }

std::optional<double> usd_equiv(const Leg& buy, const Leg& sell, Instant hour, const RateTable& rates) {
  if (sell.currency == Currency::USD) return sell.money.to_double();
  if (buy.currency == Currency::USD) return buy.money.to_double();
  auto r = rates.official_rate(buy.currency, Currency::USD, hour);
  if (!r) return std::nullopt;
  return buy.money.to_double() * *r;
}

std::vector<PricedAction> price_actions(std::span<const Leg> legs, std::span<const ArbitrageAction> actions,
                                        const RateTable& rates, FeeSign sign) {
  std::vector<PricedAction> out;
  out.reserve(actions.size());
  for (const auto& a : actions) {
    PricedAction p;
    p.action = a;
    const Leg& b = legs[a.buy];
    const Leg& s = legs[a.sell];
    p.off_er = rates.official_rate(b.currency, s.currency, a.execution_hour);
    p.excluded_missing_rate = !p.off_er.has_value();
    p.usd = usd_equiv(b, s, a.execution_hour, rates);
    p.delta_r = rates.delta_r(a.dyad, a.execution_hour);
    for (auto regime : {FeeRegime::None, FeeRegime::Actual, FeeRegime::Expected}) {
      if (regime == FeeRegime::Expected && (!b.expected_fee_pct || !s.expected_fee_pct)) continue;
      try {
        double imp = implied_rate(b, s, regime, sign);
        p.imp_er[static_cast<int>(regime)] = imp;
        if (p.off_er) p.spread[static_cast<int>(regime)] = spread_pct(imp, *p.off_er);
      } catch (const Error& e) {
        if (e.code() != "DegenerateLeg") throw;
        p.degenerate = true;
      }
    }
    out.push_back(p);
  }
  return out;
}

} // namespace arbminer
