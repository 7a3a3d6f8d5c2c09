#include "arbminer/stage_io.hpp"

#include "arbminer/csv.hpp"
#include "arbminer/error.hpp"

#include <sstream>

namespace arbminer {

namespace {

const std::vector<std::string> kLedgerColumns = {
    "trade_id",      "timestamp",   "user_id",         "side",       "currency",      "bitcoins",
    "money",         "money_rate",  "money_jpy",       "money_fee",  "money_fee_rate", "money_fee_jpy",
    "bitcoin_fee",   "bitcoin_fee_jpy", "japan",       "mc_kind",    "member_count",  "order_kind",
    "aggressive",    "thk_primary_only", "uncorrectable", "expected_fee_pct", "user_hex", "user_id_hash",
    "user_country",  "user_state",  "source_row"};

std::string opt_bool(const std::optional<bool>& b) { return b ? (*b ? "1" : "0") : ""; }
std::string opt_double(const std::optional<double>& d) { return d ? format_double(*d) : ""; }

std::optional<bool> read_opt_bool(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s == "1";
}
std::optional<double> read_opt_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, "number");
}
Decimal read_decimal(const std::string& s, const char* what) {
  auto d = Decimal::parse(s);
  if (!d) throw format_error("BadDecimal", std::string(what) + "='" + s + "'");
  return *d;
}
std::optional<std::string> read_opt_text(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

std::size_t row_index(const std::string& s, std::size_t limit) {
  auto v = parse_int(s, "row index");
  if (v < 0 || static_cast<std::size_t>(v) >= limit) throw format_error("BadStageFile", "row index out of range: " + s);
  return static_cast<std::size_t>(v);
}

} // namespace

std::string ledger_to_csv(std::span<const Leg> legs) {
  std::ostringstream os;
  os << stage_preamble("ledger", kStageVersion) << join_csv(kLedgerColumns) << "\n";
  for (const auto& l : legs) {
    os << join_csv({l.trade_id,
                    format_datetime(l.timestamp),
                    user_id_text(l.user_id),
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
                    l.bitcoin_fee_jpy.to_string(),
                    std::string(to_string(l.japan)),
                    std::to_string(static_cast<int>(l.mc_kind)),
                    std::to_string(l.member_count),
                    l.order_kind ? std::string(to_string(*l.order_kind)) : "",
                    opt_bool(l.aggressive),
                    l.thk_primary_only ? "1" : "0",
                    l.uncorrectable ? "1" : "0",
                    opt_double(l.expected_fee_pct),
                    l.user_hex.value_or(""),
                    l.user_id_hash.value_or(""),
                    l.user_country.value_or(""),
                    l.user_state.value_or(""),
                    std::to_string(l.source_row)})
       << "\n";
  }
  return os.str();
}

std::vector<Leg> ledger_from_csv(const std::filesystem::path& path) {
  auto t = read_stage_file(path, "ledger");
  std::vector<std::size_t> pos;
  for (const auto& c : kLedgerColumns) pos.push_back(t.header.at(c));
  std::vector<Leg> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    auto f = [&](std::size_t k) -> const std::string& { return row[pos[k]]; };
    Leg l;
    l.trade_id = f(0);
    auto ts = parse_datetime(f(1));
    if (!ts) throw format_error("BadDate", f(1));
    l.timestamp = *ts;
    auto u = parse_user_id(f(2));
    if (!u) throw format_error("BadUserId", f(2));
    l.user_id = *u;
    auto side = parse_side(f(3));
    auto cur = parse_currency(f(4));
    if (!side || !cur) throw format_error("BadEnumValue", f(3) + "/" + f(4));
    l.side = *side;
    l.currency = *cur;
    l.bitcoins = read_decimal(f(5), "bitcoins");
    l.money = read_decimal(f(6), "money");
    l.money_rate = read_decimal(f(7), "money_rate");
    l.money_jpy = read_decimal(f(8), "money_jpy");
    l.money_fee = read_decimal(f(9), "money_fee");
    l.money_fee_rate = read_decimal(f(10), "money_fee_rate");
    l.money_fee_jpy = read_decimal(f(11), "money_fee_jpy");
    l.bitcoin_fee = read_decimal(f(12), "bitcoin_fee");
    l.bitcoin_fee_jpy = read_decimal(f(13), "bitcoin_fee_jpy");
    l.japan = f(14) == "JP" ? JapanFlag::JP : (f(14) == "NJP" ? JapanFlag::NJP : JapanFlag::Unknown);
    l.mc_kind = static_cast<McKind>(parse_int(f(15), "mc_kind"));
    l.member_count = static_cast<int>(parse_int(f(16), "member_count"));
    if (!f(17).empty()) {
      auto k = parse_order_kind(f(17));
      if (!k) throw format_error("BadEnumValue", f(17));
      l.order_kind = *k;
    }
    l.aggressive = read_opt_bool(f(18));
    l.thk_primary_only = f(19) == "1";
    l.uncorrectable = f(20) == "1";
    l.expected_fee_pct = read_opt_double(f(21));
    l.user_hex = read_opt_text(f(22));
    l.user_id_hash = read_opt_text(f(23));
    l.user_country = read_opt_text(f(24));
    l.user_state = read_opt_text(f(25));
    l.source_row = static_cast<std::size_t>(parse_int(f(26), "source_row"));
    out.push_back(std::move(l));
  }
  return out;
}

namespace {

const std::vector<std::string> kActionColumns = {"buy_row",   "sell_row",  "user_id",        "dyad",
                                                 "buy_currency", "sell_currency", "buy_trade_id", "sell_trade_id",
                                                 "execution_time", "delta_t", "delta_q", "bitcoins"};

std::vector<std::string> action_fields(std::span<const Leg> legs, const ArbitrageAction& a) {
  return {std::to_string(a.buy),
          std::to_string(a.sell),
          std::to_string(a.user),
          a.dyad.name(),
          std::string(to_string(legs[a.buy].currency)),
          std::string(to_string(legs[a.sell].currency)),
          legs[a.buy].trade_id,
          legs[a.sell].trade_id,
          format_datetime(a.execution_time),
          std::to_string(a.delta_t),
          format_double(a.delta_q),
          legs[a.buy].bitcoins.to_string()};
}

ArbitrageAction action_from(const StageTable& t, const std::vector<std::string>& row, std::span<const Leg> legs) {
  std::size_t buy = row_index(row[t.header.at("buy_row")], legs.size());
  std::size_t sell = row_index(row[t.header.at("sell_row")], legs.size());
  if (legs[buy].trade_id != row[t.header.at("buy_trade_id")] || legs[sell].trade_id != row[t.header.at("sell_trade_id")])
    throw format_error("BadStageFile", "action rows do not match the ledger");
  return make_action(legs, buy, sell);
}

} // namespace

std::string actions_to_csv(std::span<const Leg> legs, std::span<const ArbitrageAction> actions) {
  std::ostringstream os;
  os << stage_preamble("actions", kStageVersion) << join_csv(kActionColumns) << "\n";
  for (const auto& a : actions) os << join_csv(action_fields(legs, a)) << "\n";
  return os.str();
}

std::vector<ArbitrageAction> actions_from_csv(const std::filesystem::path& path, std::span<const Leg> legs) {
  auto t = read_stage_file(path, "actions");
  std::vector<ArbitrageAction> out;
  for (const auto& row : t.rows) out.push_back(action_from(t, row, legs));
  return out;
}

std::string priced_to_csv(std::span<const Leg> legs, std::span<const PricedAction> priced) {
  std::ostringstream os;
  auto cols = kActionColumns;
  for (const char* c : {"off_er", "imp_er_none", "imp_er_actual", "imp_er_expected", "spread_none", "spread_actual",
                        "spread_expected", "usd_equiv", "delta_r", "excluded_missing_rate", "degenerate"})
    cols.push_back(c);
  os << stage_preamble("priced", kStageVersion) << join_csv(cols) << "\n";
  for (const auto& p : priced) {
    auto f = action_fields(legs, p.action);
    f.push_back(opt_double(p.off_er));
    for (const auto& v : p.imp_er) f.push_back(opt_double(v));
    for (const auto& v : p.spread) f.push_back(opt_double(v));
    f.push_back(opt_double(p.usd));
    f.push_back(opt_double(p.delta_r));
    f.push_back(p.excluded_missing_rate ? "1" : "0");
    f.push_back(p.degenerate ? "1" : "0");
    os << join_csv(f) << "\n";
  }
  return os.str();
}

std::vector<PricedAction> priced_from_csv(const std::filesystem::path& path, std::span<const Leg> legs) {
  auto t = read_stage_file(path, "priced");
  std::vector<PricedAction> out;
  const char* imp[] = {"imp_er_none", "imp_er_actual", "imp_er_expected"};
  const char* spr[] = {"spread_none", "spread_actual", "spread_expected"};
  for (const auto& row : t.rows) {
    PricedAction p;
    p.action = action_from(t, row, legs);
    p.off_er = read_opt_double(row[t.header.at("off_er")]);
    for (int k = 0; k < 3; ++k) {
      p.imp_er[k] = read_opt_double(row[t.header.at(imp[k])]);
      p.spread[k] = read_opt_double(row[t.header.at(spr[k])]);
    }
    p.usd = read_opt_double(row[t.header.at("usd_equiv")]);
    p.delta_r = read_opt_double(row[t.header.at("delta_r")]);
    p.excluded_missing_rate = row[t.header.at("excluded_missing_rate")] == "1";
    p.degenerate = row[t.header.at("degenerate")] == "1";
    out.push_back(p);
  }
  return out;
}

namespace {

const std::vector<std::string> kProfileColumns = {
    "user_id",     "n_actions",      "n_markets",   "n_currencies", "d_currencies", "log_currencies",
    "log_actions", "d_metaorder",    "d_aggressive", "pc1_score",   "days_to_new_market"};

} // namespace

std::string profiles_to_csv(std::span<const UserProfile> profiles) {
  std::ostringstream os;
  os << stage_preamble("profiles", kStageVersion) << join_csv(kProfileColumns) << "\n";
  for (const auto& p : profiles)
    os << join_csv({std::to_string(p.user), std::to_string(p.n_actions), std::to_string(p.n_markets),
                    std::to_string(p.n_currencies), format_double(p.d_currencies), format_double(p.log_currencies),
                    format_double(p.log_actions), format_double(p.d_metaorder), format_double(p.d_aggressive),
                    format_double(p.pc1_score),
                    p.days_to_new_market ? std::to_string(*p.days_to_new_market) : ""})
       << "\n";
  return os.str();
}

std::vector<UserProfile> profiles_from_csv(const std::filesystem::path& path) {
  auto t = read_stage_file(path, "profiles");
  std::vector<UserProfile> out;
  for (const auto& row : t.rows) {
    auto f = [&](const char* c) -> const std::string& { return row[t.header.at(c)]; };
    UserProfile p;
    p.user = parse_int(f("user_id"), "user_id");
    p.n_actions = static_cast<std::size_t>(parse_int(f("n_actions"), "n_actions"));
    p.n_markets = static_cast<std::size_t>(parse_int(f("n_markets"), "n_markets"));
    p.n_currencies = static_cast<std::size_t>(parse_int(f("n_currencies"), "n_currencies"));
    p.d_currencies = parse_double(f("d_currencies"), "d_currencies");
    p.log_currencies = parse_double(f("log_currencies"), "log_currencies");
    p.log_actions = parse_double(f("log_actions"), "log_actions");
    p.d_metaorder = parse_double(f("d_metaorder"), "d_metaorder");
    p.d_aggressive = parse_double(f("d_aggressive"), "d_aggressive");
    p.pc1_score = parse_double(f("pc1_score"), "pc1_score");
    if (!f("days_to_new_market").empty()) p.days_to_new_market = parse_int(f("days_to_new_market"), "days");
    out.push_back(p);
  }
  return out;
}

std::string metaorders_to_csv(std::span<const ArbitrageAction> actions, std::span<const Metaorder> metaorders) {
  std::ostringstream os;
  os << stage_preamble("metaorders", kStageVersion)
     << "user_id,buy_currency,sell_currency,length,start,end,mean_delay,total_bitcoins,total_usd\n";
  for (const auto& m : metaorders)
    os << join_csv({std::to_string(m.user), std::string(to_string(m.buy_currency)),
                    std::string(to_string(m.sell_currency)), std::to_string(m.actions.size()),
                    format_datetime(actions[m.actions.front()].execution_time),
                    format_datetime(actions[m.actions.back()].execution_time), format_double(m.mean_delay),
                    format_double(m.total_bitcoins), opt_double(m.total_usd)})
       << "\n";
  return os.str();
}

} // namespace arbminer
