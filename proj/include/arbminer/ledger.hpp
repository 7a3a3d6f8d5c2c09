#pragma once

#include "arbminer/decimal.hpp"
#include "arbminer/time.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace arbminer {

enum class Currency : std::uint8_t {
  USD, EUR, GBP, PLN, AUD, JPY, CAD, SEK, CHF, RUB, CNY, NZD, SGD, HKD, DKK, NOK, THB
};
inline constexpr std::size_t kCurrencyCount = 17;

std::string_view to_string(Currency c);
std::optional<Currency> parse_currency(std::string_view code);
const std::array<Currency, kCurrencyCount>& all_currencies();

enum class Side : std::uint8_t { Buy, Sell };
std::string_view to_string(Side s);
std::optional<Side> parse_side(std::string_view s);

enum class JapanFlag : std::uint8_t { JP, NJP, Unknown };
std::string_view to_string(JapanFlag f);

// Multi-currency settlement scheme of the trade a leg belongs to.
enum class McKind : std::uint8_t { Standard = 0, Tibanne = 1, THK = 2 };

enum class OrderKind : std::uint8_t { Limit, Market, LimitMixed, MarketMixed };
std::string_view to_string(OrderKind k);
std::optional<OrderKind> parse_order_kind(std::string_view s);
inline bool is_market(OrderKind k) { return k == OrderKind::Market || k == OrderKind::MarketMixed; }

enum class Initiator : std::uint8_t { Bid, Ask };
std::string_view to_string(Initiator i);
std::optional<Initiator> parse_initiator(std::string_view s);

using UserId = std::int64_t;
inline constexpr UserId kDeletedUser = -1;
inline constexpr UserId kTibanneUser = -2;
inline constexpr UserId kThkUser = -3;
inline constexpr std::string_view kDeletedLiteral = "DELETED";
inline constexpr std::string_view kTibanneLiteral = "TIBANNE_LIMITED_HK";
inline constexpr std::string_view kThkLiteral = "THK";

std::optional<UserId> parse_user_id(std::string_view s);
std::string user_id_text(UserId id);

struct Leg {
  std::string trade_id;
  Instant timestamp{};
  UserId user_id = 0;
  Side side = Side::Buy;
  Currency currency = Currency::USD;
  Decimal bitcoins;
  Decimal money;
  Decimal money_rate;
  Decimal money_jpy;
  Decimal money_fee;
  Decimal money_fee_rate;
  Decimal money_fee_jpy;
  Decimal bitcoin_fee;
  Decimal bitcoin_fee_jpy;
  JapanFlag japan = JapanFlag::Unknown;
  std::optional<std::string> user_hex;
  std::optional<std::string> user_id_hash;
  std::optional<std::string> user_country;
  std::optional<std::string> user_state;
  McKind mc_kind = McKind::Standard;

  std::size_t source_row = 0;
  int member_count = 1;
  bool thk_primary_only = false;
  bool uncorrectable = false;
  std::optional<OrderKind> order_kind;
  std::optional<bool> aggressive;
  std::optional<double> expected_fee_pct;

  bool is_deleted() const { return user_id == kDeletedUser; }
  bool is_intermediary() const { return user_id == kTibanneUser || user_id == kThkUser; }
};

// One buy and one sell leg (indices into a leg sequence) sharing a trade id.
struct Trade {
  std::string trade_id;
  std::size_t buy = 0;
  std::size_t sell = 0;
};

struct TradeGrouping {
  std::vector<Trade> trades;
  std::vector<std::size_t> orphans;
};

// Pairs the k-th buy with the k-th sell of each trade id, in sequence order.
TradeGrouping group_trades(std::span<const Leg> legs);

// Ids of an aggregated leg are joined with '+'.
std::vector<std::string_view> member_trade_ids(std::string_view trade_id);
bool share_trade(const Leg& a, const Leg& b);

struct PublicTradeRecord {
  std::string trade_id;
  Instant timestamp{};
  Currency currency = Currency::USD;
  Decimal amount;
  Decimal price;
  OrderKind order_kind = OrderKind::Limit;
  Initiator initiator = Initiator::Bid;
};

// Unordered currency pair, stored in code order (EUR/USD, GBP/USD, ...).
struct Dyad {
  Currency first = Currency::USD;
  Currency second = Currency::USD;

  static Dyad of(Currency a, Currency b);
  std::string name() const;
  static std::optional<Dyad> parse(std::string_view s);
  int code() const { return static_cast<int>(first) * 32 + static_cast<int>(second); }
  friend bool operator==(const Dyad&, const Dyad&) = default;
  friend auto operator<=>(const Dyad& a, const Dyad& b) { return a.name() <=> b.name(); }
};

// Hourly bar of the official rate: price of one `base` in `quote`.
struct RateBar {
  Currency base = Currency::USD;
  Currency quote = Currency::USD;
  Instant hour{};
  double open = 0.0;
};

struct DailyVolume {
  Day day{};
  double volume = 0.0;
};

} // namespace arbminer
