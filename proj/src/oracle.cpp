#include "arbminer/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>

namespace arbminer {

namespace {

std::set<std::string> ids_of(const Leg& l) {
  std::set<std::string> out;
  std::string cur;
  for (char c : l.trade_id) {
    if (c == '+') {
      out.insert(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.insert(cur);
  return out;
}

bool disjoint(const Leg& a, const Leg& b) {
  auto x = ids_of(a), y = ids_of(b);
  for (const auto& id : x)
    if (y.count(id)) return false;
  return true;
}

Decimal gap_num(const Leg& b, const Leg& s) { return (b.bitcoins - s.bitcoins).abs(); }
Decimal gap_den(const Leg& b, const Leg& s) { return b.bitcoins + s.bitcoins; }

bool valid(const Leg& b, const Leg& s, const MatchConfig& cfg) {
  if (b.side != Side::Buy || s.side != Side::Sell || b.currency == s.currency) return false;
  const std::int64_t dt = std::abs((b.timestamp - s.timestamp).count());
  if (dt > cfg.max_delta_t) return false;
  if (!disjoint(b, s)) return false;
  return Decimal(200) * gap_num(b, s) <= cfg.max_delta_q * gap_den(b, s);
}

} // namespace

std::vector<ArbitrageAction> brute_force_match(std::span<const Leg> legs, const MatchConfig& cfg) {
  std::map<UserId, std::vector<std::size_t>> by_user;
  std::map<UserId, std::set<Currency>> currencies;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    by_user[legs[i].user_id].push_back(i);
    currencies[legs[i].user_id].insert(legs[i].currency);
  }

  std::vector<ArbitrageAction> out;
  for (auto& [user, idx] : by_user) {
    if (currencies[user].size() < 2) continue;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(legs[a].timestamp, legs[a].trade_id, a) < std::tie(legs[b].timestamp, legs[b].trade_id, b);
    });
    std::set<std::size_t> used;
    for (std::size_t leg : idx) {
      if (used.count(leg)) continue;
      std::optional<std::size_t> best;
      for (std::size_t other : idx) {
        if (other == leg || used.count(other)) continue;
        const bool leg_buys = legs[leg].side == Side::Buy;
        const Leg& b = legs[leg_buys ? leg : other];
        const Leg& s = legs[leg_buys ? other : leg];
        if (!valid(b, s, cfg)) continue;
        if (!best) {
          best = other;
          continue;
        }
        const Leg& bb = legs[leg_buys ? leg : *best];
        const Leg& bs = legs[leg_buys ? *best : leg];
        const std::int64_t dt = std::abs((b.timestamp - s.timestamp).count());
        const std::int64_t best_dt = std::abs((bb.timestamp - bs.timestamp).count());
        if (dt != best_dt) {
          if (dt < best_dt) best = other;
          continue;
        }
        const Decimal lhs = gap_num(b, s) * gap_den(bb, bs);
        const Decimal rhs = gap_num(bb, bs) * gap_den(b, s);
        if (lhs != rhs) {
          if (lhs < rhs) best = other;
          continue;
        }
        if (std::tie(legs[other].trade_id, other) < std::tie(legs[*best].trade_id, *best)) best = other;
      }
      if (!best) continue;
      used.insert(leg);
      used.insert(*best);
      const bool leg_buys = legs[leg].side == Side::Buy;
      out.push_back(make_action(legs, leg_buys ? leg : *best, leg_buys ? *best : leg));
    }
  }
  std::sort(out.begin(), out.end(), [&](const ArbitrageAction& a, const ArbitrageAction& b) {
    return std::tie(a.user, a.execution_time, legs[a.buy].trade_id) <
           std::tie(b.user, b.execution_time, legs[b.buy].trade_id);
  });
  return out;
}

} // namespace arbminer
