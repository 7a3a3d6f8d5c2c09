#include "arbminer/matcher.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace arbminer {

VolumeGap VolumeGap::of(const Decimal& b, const Decimal& s) {
  int scale = std::max(b.scale(), s.scale());
  Decimal::Rep x = b.mantissa_at(scale);
  Decimal::Rep y = s.mantissa_at(scale);
  return {x > y ? x - y : y - x, x + y};
}

double VolumeGap::percent() const {
  if (sum == 0) return 0.0;
  return static_cast<double>(static_cast<long double>(diff) * 200.0L / static_cast<long double>(sum));
}

bool VolumeGap::within(const Decimal& max_pct) const {
  return diff * 200 * pow10_i128(max_pct.scale()) <= max_pct.mantissa() * sum;
}

std::vector<UserId> eligible_users(std::span<const Leg> legs) {
  std::map<UserId, std::set<Currency>> cur;
  for (const auto& l : legs) cur[l.user_id].insert(l.currency);
  std::vector<UserId> out;
  for (const auto& [u, c] : cur)
    if (c.size() >= 2) out.push_back(u);
  return out;
}

namespace {

bool chrono_less(std::span<const Leg> legs, std::size_t a, std::size_t b) {
  if (legs[a].timestamp != legs[b].timestamp) return legs[a].timestamp < legs[b].timestamp;
  if (legs[a].trade_id != legs[b].trade_id) return legs[a].trade_id < legs[b].trade_id;
  return a < b;
}

} // namespace

std::vector<Candidate> enumerate_candidates(std::span<const Leg> legs, std::span<const std::size_t> user_legs,
                                            const MatchConfig& cfg) {
  std::vector<std::size_t> order(user_legs.begin(), user_legs.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return chrono_less(legs, a, b); });
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Leg& a = legs[order[i]];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const Leg& b = legs[order[j]];
      std::int64_t dt = (b.timestamp - a.timestamp).count();
      if (dt > cfg.max_delta_t) break;
      if (a.side == b.side || a.currency == b.currency || share_trade(a, b)) continue;
      const bool a_buys = a.side == Side::Buy;
      std::size_t buy = a_buys ? order[i] : order[j];
      std::size_t sell = a_buys ? order[j] : order[i];
      VolumeGap gap = VolumeGap::of(legs[buy].bitcoins, legs[sell].bitcoins);
      if (!gap.within(cfg.max_delta_q)) continue;
      out.push_back({buy, sell, dt, gap});
    }
  }
  return out;
}

ArbitrageAction make_action(std::span<const Leg> legs, std::size_t buy, std::size_t sell) {
  const Leg& b = legs[buy];
  const Leg& s = legs[sell];
  ArbitrageAction a;
  a.buy = buy;
  a.sell = sell;
  a.user = b.user_id;
  a.dyad = Dyad::of(b.currency, s.currency);
  a.delta_t = std::abs((b.timestamp - s.timestamp).count());
  a.delta_q = VolumeGap::of(b.bitcoins, s.bitcoins).percent();
  a.execution_time = std::min(b.timestamp, s.timestamp);
  a.execution_hour = hour_floor(a.execution_time);
  return a;
}

std::vector<ArbitrageAction> resolve_matches(std::span<const Leg> legs, std::span<const Candidate> candidates) {
  std::unordered_map<std::size_t, std::vector<std::size_t>> by_leg;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    by_leg[candidates[c].buy].push_back(c);
    by_leg[candidates[c].sell].push_back(c);
  }
  std::vector<std::size_t> order;
  order.reserve(by_leg.size());
  for (const auto& kv : by_leg) order.push_back(kv.first);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return chrono_less(legs, a, b); });

  std::unordered_map<std::size_t, bool> used;
  std::vector<ArbitrageAction> out;
  for (std::size_t leg : order) {
    if (used[leg]) continue;
    const Candidate* best = nullptr;
    std::size_t best_partner = 0;
    for (std::size_t c : by_leg[leg]) {
      const Candidate& cand = candidates[c];
      std::size_t partner = cand.buy == leg ? cand.sell : cand.buy;
      if (used[partner]) continue;
      bool better = !best;
      if (best) {
        if (cand.delta_t != best->delta_t) better = cand.delta_t < best->delta_t;
        else if (!(cand.gap == best->gap)) better = cand.gap < best->gap;
        else if (legs[partner].trade_id != legs[best_partner].trade_id)
          better = legs[partner].trade_id < legs[best_partner].trade_id;
        else better = partner < best_partner;
      }
      if (better) {
        best = &cand;
        best_partner = partner;
      }
    }
    if (!best) continue;
    used[best->buy] = used[best->sell] = true;
    out.push_back(make_action(legs, best->buy, best->sell));
  }
  return out;
}

void sort_actions(std::span<const Leg> legs, std::vector<ArbitrageAction>& actions) {
  std::sort(actions.begin(), actions.end(), [&](const ArbitrageAction& a, const ArbitrageAction& b) {
    if (a.user != b.user) return a.user < b.user;
    if (a.execution_time != b.execution_time) return a.execution_time < b.execution_time;
    return legs[a.buy].trade_id < legs[b.buy].trade_id;
  });
}

namespace {

std::map<UserId, std::vector<std::size_t>> legs_of_eligible(std::span<const Leg> legs) {
  std::map<UserId, std::vector<std::size_t>> by_user;
  for (std::size_t i = 0; i < legs.size(); ++i) by_user[legs[i].user_id].push_back(i);
  for (auto it = by_user.begin(); it != by_user.end();) {
    std::set<Currency> cur;
    for (auto i : it->second) cur.insert(legs[i].currency);
    it = cur.size() >= 2 ? std::next(it) : by_user.erase(it);
  }
  return by_user;
}

} // namespace

std::vector<ArbitrageAction> match_ledger(std::span<const Leg> legs, const MatchConfig& cfg) {
  std::vector<ArbitrageAction> out;
  for (const auto& [user, idx] : legs_of_eligible(legs)) {
    auto cands = enumerate_candidates(legs, idx, cfg);
    auto acts = resolve_matches(legs, cands);
    out.insert(out.end(), acts.begin(), acts.end());
  }
  sort_actions(legs, out);
  return out;
}

std::vector<SweepCell> sweep_thresholds(std::span<const Leg> legs, std::span<const std::int64_t> delta_ts,
                                        std::span<const Decimal> delta_qs) {
  auto groups = legs_of_eligible(legs);
  std::vector<SweepCell> out;
  for (auto dt : delta_ts)
    for (const auto& dq : delta_qs) {
      SweepCell cell{dt, dq, 0, 0, 0};
      MatchConfig cfg{dt, dq};
      for (const auto& [user, idx] : groups) {
        auto cands = enumerate_candidates(legs, idx, cfg);
        auto acts = resolve_matches(legs, cands);
        cell.candidates += cands.size();
        cell.actions += acts.size();
        if (!acts.empty()) ++cell.users;
      }
      out.push_back(cell);
    }
  return out;
}

} // namespace arbminer
