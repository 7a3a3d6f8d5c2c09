#include "arbminer/ledger.hpp"

#include <algorithm>
#include <charconv>
#include <map>

namespace arbminer {

namespace {

constexpr std::array<std::string_view, kCurrencyCount> kCodes = {
    "USD", "EUR", "GBP", "PLN", "AUD", "JPY", "CAD", "SEK", "CHF",
    "RUB", "CNY", "NZD", "SGD", "HKD", "DKK", "NOK", "THB"};

} // namespace

std::string_view to_string(Currency c) { return kCodes[static_cast<std::size_t>(c)]; }

std::optional<Currency> parse_currency(std::string_view code) {
  for (std::size_t i = 0; i < kCodes.size(); ++i)
    if (kCodes[i] == code) return static_cast<Currency>(i);
  return std::nullopt;
}

const std::array<Currency, kCurrencyCount>& all_currencies() {
  static const auto all = [] {
    std::array<Currency, kCurrencyCount> a{};
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<Currency>(i);
    return a;
  }();
  return all;
}

std::string_view to_string(Side s) { return s == Side::Buy ? "buy" : "sell"; }

std::optional<Side> parse_side(std::string_view s) {
  if (s == "buy") return Side::Buy;
  if (s == "sell") return Side::Sell;
  return std::nullopt;
}

std::string_view to_string(JapanFlag f) {
  switch (f) {
  case JapanFlag::JP: return "JP";
  case JapanFlag::NJP: return "NJP";
  default: return "";
  }
}

std::string_view to_string(OrderKind k) {
  switch (k) {
  case OrderKind::Limit: return "limit";
  case OrderKind::Market: return "market";
  case OrderKind::LimitMixed: return "limit,mixed_currency";
  default: return "market,mixed_currency";
  }
}

std::optional<OrderKind> parse_order_kind(std::string_view s) {
  if (s == "limit") return OrderKind::Limit;
  if (s == "market") return OrderKind::Market;
  if (s == "limit,mixed_currency") return OrderKind::LimitMixed;
  if (s == "market,mixed_currency") return OrderKind::MarketMixed;
  return std::nullopt;
}

std::string_view to_string(Initiator i) { return i == Initiator::Bid ? "bid" : "ask"; }

std::optional<Initiator> parse_initiator(std::string_view s) {
  if (s == "bid") return Initiator::Bid;
  if (s == "ask") return Initiator::Ask;
  return std::nullopt;
}

std::optional<UserId> parse_user_id(std::string_view s) {
  if (s == kDeletedLiteral) return kDeletedUser;
  if (s == kTibanneLiteral) return kTibanneUser;
  if (s == kThkLiteral) return kThkUser;
  UserId v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || v < 0) return std::nullopt;
  return v;
}

std::string user_id_text(UserId id) {
  switch (id) {
  case kDeletedUser: return std::string(kDeletedLiteral);
  case kTibanneUser: return std::string(kTibanneLiteral);
  case kThkUser: return std::string(kThkLiteral);
  default: return std::to_string(id);
  }
}

TradeGrouping group_trades(std::span<const Leg> legs) {
  struct Pending {
    std::vector<std::size_t> buys, sells;
  };
  std::map<std::string_view, Pending> by_id;
  std::vector<std::string_view> order;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    auto [it, fresh] = by_id.try_emplace(legs[i].trade_id);
    if (fresh) order.push_back(legs[i].trade_id);
    (legs[i].side == Side::Buy ? it->second.buys : it->second.sells).push_back(i);
  }
  TradeGrouping g;
  for (auto id : order) {
    const auto& p = by_id[id];
    std::size_t n = std::min(p.buys.size(), p.sells.size());
    for (std::size_t k = 0; k < n; ++k) g.trades.push_back({std::string(id), p.buys[k], p.sells[k]});
    for (std::size_t k = n; k < p.buys.size(); ++k) g.orphans.push_back(p.buys[k]);
    for (std::size_t k = n; k < p.sells.size(); ++k) g.orphans.push_back(p.sells[k]);
  }
  std::sort(g.orphans.begin(), g.orphans.end());
  return g;
}

std::vector<std::string_view> member_trade_ids(std::string_view trade_id) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = trade_id.find('+', start);
    out.push_back(trade_id.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool share_trade(const Leg& a, const Leg& b) {
  if (a.trade_id.find('+') == std::string::npos && b.trade_id.find('+') == std::string::npos)
    return a.trade_id == b.trade_id;
  auto ma = member_trade_ids(a.trade_id);
  auto mb = member_trade_ids(b.trade_id);
  for (auto x : ma)
    for (auto y : mb)
      if (x == y) return true;
  return false;
}

Dyad Dyad::of(Currency a, Currency b) {
  return to_string(a) <= to_string(b) ? Dyad{a, b} : Dyad{b, a};
}

std::string Dyad::name() const { return std::string(to_string(first)) + "/" + std::string(to_string(second)); }

std::optional<Dyad> Dyad::parse(std::string_view s) {
  if (s.size() != 7 || s[3] != '/') return std::nullopt;
  auto a = parse_currency(s.substr(0, 3));
  auto b = parse_currency(s.substr(4, 3));
  if (!a || !b || *a == *b) return std::nullopt;
  return Dyad::of(*a, *b);
}

} // namespace arbminer
