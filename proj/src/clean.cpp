#include "arbminer/clean.hpp"

#include "arbminer/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace arbminer {

std::string_view to_string(DedupMethod m) {
  switch (m) {
  case DedupMethod::Conservative: return "conservative";
  case DedupMethod::Aggressive: return "aggressive";
  case DedupMethod::TradeId: return "trade_id";
  default: return "pairs";
  }
}

std::optional<DedupMethod> parse_dedup_method(std::string_view s) {
  for (auto m : {DedupMethod::Conservative, DedupMethod::Aggressive, DedupMethod::TradeId, DedupMethod::Pairs})
    if (to_string(m) == s) return m;
  if (s == "tradeid") return DedupMethod::TradeId;
  return std::nullopt;
}

std::size_t CleanReport::removed() const {
  return duplicates + orphan_legs + self_trades + last_day + deleted_users + zero_bitcoins + intermediary_rows +
         thk_incomplete;
}

std::string CleanReport::to_text() const {
  std::ostringstream os;
  os << "input_rows=" << input_rows << "\n"
     << "output_rows=" << output_rows << "\n"
     << "duplicates=" << duplicates << "\n";
  for (const auto& [m, n] : duplicates_by_method) os << "duplicates_" << m << "=" << n << "\n";
  os << "orphan_legs=" << orphan_legs << "\n"
     << "self_trades=" << self_trades << "\n"
     << "last_day=" << last_day << "\n"
     << "deleted_users=" << deleted_users << "\n"
     << "zero_bitcoins=" << zero_bitcoins << "\n"
     << "intermediary_rows=" << intermediary_rows << "\n"
     << "thk_incomplete=" << thk_incomplete << "\n"
     << "orphans_seen=" << orphans_seen << "\n"
     << "tibanne_corrected=" << tibanne_corrected << "\n"
     << "tibanne_uncorrectable=" << tibanne_uncorrectable << "\n"
     << "sekjpy_corrected=" << sekjpy_corrected << "\n"
     << "markus_remapped=" << markus_remapped << "\n"
     << "willy_remapped=" << willy_remapped << "\n";
  return os.str();
}

namespace {

struct RowKey {
  std::string_view trade_id;
  UserId user = 0;
  std::int64_t ts = 0;
  Side side = Side::Buy;
  Decimal btc;
  Decimal jpy;

  bool operator==(const RowKey& o) const {
    return trade_id == o.trade_id && user == o.user && ts == o.ts && side == o.side && btc == o.btc && jpy == o.jpy;
  }
};

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

struct RowKeyHash {
  std::size_t operator()(const RowKey& k) const noexcept {
    std::size_t h = std::hash<std::string_view>{}(k.trade_id);
    h = mix(h, std::hash<UserId>{}(k.user));
    h = mix(h, std::hash<std::int64_t>{}(k.ts));
    h = mix(h, static_cast<std::size_t>(k.side));
    h = mix(h, k.btc.hash());
    return mix(h, k.jpy.hash());
  }
};

struct PairKeyHash {
  std::size_t operator()(const std::pair<RowKey, RowKey>& p) const noexcept {
    RowKeyHash h;
    return mix(h(p.first), h(p.second));
  }
};

RowKey make_key(const Leg& l, DedupMethod m) {
  RowKey k;
  k.user = l.user_id;
  k.ts = epoch_seconds(l.timestamp);
  k.side = l.side;
  k.btc = l.bitcoins;
  if (m == DedupMethod::Conservative) k.jpy = l.money_jpy;
  if (m == DedupMethod::TradeId) k.trade_id = l.trade_id;
  return k;
}

// A trade occurrence: one or two row indices, ordered by first appearance.
struct Occurrence {
  std::size_t first;
  std::optional<std::size_t> buy, sell;
};

std::vector<Occurrence> occurrences(std::span<const Leg> legs, std::size_t& orphans) {
  auto g = group_trades(legs);
  std::vector<Occurrence> occ;
  occ.reserve(g.trades.size() + g.orphans.size());
  for (const auto& t : g.trades) occ.push_back({std::min(t.buy, t.sell), t.buy, t.sell});
  for (auto i : g.orphans) {
    Occurrence o{i, std::nullopt, std::nullopt};
    (legs[i].side == Side::Buy ? o.buy : o.sell) = i;
    occ.push_back(o);
  }
  orphans = g.orphans.size();
  std::sort(occ.begin(), occ.end(), [](const Occurrence& a, const Occurrence& b) { return a.first < b.first; });
  return occ;
}

} // namespace

DedupResult dedup(std::span<const Leg> legs, DedupMethod method) {
  DedupResult r;
  r.report.input_rows = legs.size();
  std::vector<char> drop(legs.size(), 0);
  std::size_t orphan_count = 0;
  auto occ = occurrences(legs, orphan_count);
  r.report.orphans_seen = orphan_count;

  if (method == DedupMethod::Pairs) {
    std::unordered_set<std::pair<RowKey, RowKey>, PairKeyHash> seen;
    for (const auto& o : occ) {
      if (!o.buy || !o.sell) {
        drop[o.first] = 2;
        continue;
      }
      auto key = std::make_pair(make_key(legs[*o.buy], DedupMethod::Aggressive),
                                make_key(legs[*o.sell], DedupMethod::Aggressive));
      if (!seen.insert(key).second) drop[*o.buy] = drop[*o.sell] = 1;
    }
  } else {
    std::vector<char> dup(legs.size(), 0);
    std::unordered_set<RowKey, RowKeyHash> seen;
    seen.reserve(legs.size());
    for (std::size_t i = 0; i < legs.size(); ++i)
      if (!seen.insert(make_key(legs[i], method)).second) dup[i] = 1;
    for (const auto& o : occ) {
      bool any = (o.buy && dup[*o.buy]) || (o.sell && dup[*o.sell]);
      if (!any) continue;
      if (o.buy) drop[*o.buy] = 1;
      if (o.sell) drop[*o.sell] = 1;
    }
  }

  for (std::size_t i = 0; i < legs.size(); ++i) {
    if (drop[i] == 0) {
      r.legs.push_back(legs[i]);
      continue;
    }
    r.removed_rows.push_back(i);
    if (drop[i] == 1) ++r.report.duplicates;
    else ++r.report.orphan_legs;
  }
  r.report.duplicates_by_method[std::string(to_string(method))] = r.report.duplicates;
  r.report.output_rows = r.legs.size();
  return r;
}

namespace {

enum Reason : char { Keep = 0, LastDay, Deleted, ZeroBtc, Intermediary, ThkIncomplete, SelfTrade };

struct PublicKeyHash {
  std::size_t operator()(const std::pair<std::string, Currency>& k) const noexcept {
    return mix(std::hash<std::string>{}(k.first), static_cast<std::size_t>(k.second));
  }
};

using PublicIndex = std::unordered_map<std::pair<std::string, Currency>, std::size_t, PublicKeyHash>;

PublicIndex index_public(std::span<const PublicTradeRecord> records) {
  PublicIndex idx;
  for (std::size_t i = 0; i < records.size(); ++i) idx.emplace(std::make_pair(records[i].trade_id, records[i].currency), i);
  return idx;
}

bool near_ratio(double ratio, double target, double tol) { return std::fabs(ratio / target - 1.0) <= tol; }

} // namespace

SanityResult sanity_filter(std::vector<Leg> legs, std::vector<PublicTradeRecord> pub, const SanityOptions& opt) {
  SanityResult r;
  CleanReport& rep = r.report;
  rep.input_rows = legs.size();
  std::vector<char> why(legs.size(), Keep);

  if (opt.drop_last_day && !legs.empty()) {
    Day last = day_of(std::max_element(legs.begin(), legs.end(), [](const Leg& a, const Leg& b) {
                        return a.timestamp < b.timestamp;
                      })->timestamp);
    for (std::size_t i = 0; i < legs.size(); ++i)
      if (day_of(legs[i].timestamp) == last) why[i] = LastDay;
  }

  auto drop_trades_where = [&](auto pred, Reason reason) {
    std::unordered_set<std::string> ids;
    for (std::size_t i = 0; i < legs.size(); ++i)
      if (why[i] == Keep && pred(legs[i])) ids.insert(legs[i].trade_id);
    for (std::size_t i = 0; i < legs.size(); ++i)
      if (why[i] == Keep && ids.count(legs[i].trade_id)) why[i] = reason;
  };
  drop_trades_where([](const Leg& l) { return l.is_deleted(); }, Deleted);
  drop_trades_where([](const Leg& l) { return l.bitcoins.is_zero(); }, ZeroBtc);

  for (std::size_t i = 0; i < legs.size(); ++i)
    if (why[i] == Keep && legs[i].is_intermediary()) why[i] = Intermediary;

  {
    struct Sides {
      std::vector<std::size_t> rows;
      bool buy = false, sell = false;
    };
    std::unordered_map<std::string, Sides> thk;
    std::vector<std::string> order;
    for (std::size_t i = 0; i < legs.size(); ++i) {
      if (why[i] != Keep || legs[i].mc_kind != McKind::THK) continue;
      auto [it, fresh] = thk.try_emplace(legs[i].trade_id);
      if (fresh) order.push_back(legs[i].trade_id);
      it->second.rows.push_back(i);
      (legs[i].side == Side::Buy ? it->second.buy : it->second.sell) = true;
    }
    for (const auto& id : order) {
      const auto& s = thk[id];
      if (s.buy && s.sell) continue;
      for (std::size_t k = 0; k < s.rows.size(); ++k) {
        if (opt.include_thk_primaries && k == 0) legs[s.rows[k]].thk_primary_only = true;
        else why[s.rows[k]] = ThkIncomplete;
      }
    }
  }

  {
    std::vector<std::size_t> kept;
    std::vector<Leg> view;
    for (std::size_t i = 0; i < legs.size(); ++i)
      if (why[i] == Keep) {
        kept.push_back(i);
        view.push_back(legs[i]);
      }
    for (const auto& t : group_trades(view).trades)
      if (view[t.buy].user_id == view[t.sell].user_id) why[kept[t.buy]] = why[kept[t.sell]] = SelfTrade;
  }

  // Public prices for SEK and JPY were published off by a factor of 100 for a
  // while; each record is checked against the ledger's own money/bitcoin ratio.
  {
    std::unordered_map<std::pair<std::string, Currency>, double, PublicKeyHash> leaked_ratio;
    for (std::size_t i = 0; i < legs.size(); ++i) {
      const Leg& l = legs[i];
      if (why[i] != Keep || l.bitcoins.sign() <= 0 || l.mc_kind == McKind::Tibanne) continue;
      if (l.currency != Currency::SEK && l.currency != Currency::JPY) continue;
      leaked_ratio.emplace(std::make_pair(l.trade_id, l.currency), l.money.to_double() / l.bitcoins.to_double());
    }
    for (auto& p : pub) {
      if ((p.currency != Currency::SEK && p.currency != Currency::JPY) || p.timestamp >= opt.sekjpy_cutoff) continue;
      auto it = leaked_ratio.find({p.trade_id, p.currency});
      if (it == leaked_ratio.end() || it->second <= 0) continue;
      double ratio = p.price.to_double() / it->second;
      if (near_ratio(ratio, 100.0, opt.reconcile_tolerance)) {
        p.price = Decimal::from_parts(p.price.mantissa(), p.price.scale() + 2).normalized();
        ++rep.sekjpy_corrected;
      } else if (near_ratio(ratio, 0.01, opt.reconcile_tolerance)) {
        p.price = (p.price * Decimal(100)).normalized();
        ++rep.sekjpy_corrected;
      }
    }
  }

  // Tibanne-settled trades sometimes carry the same fiat figure on both legs;
  // the leg that disagrees with its public price is rebuilt from it.
  {
    auto idx = index_public(pub);
    std::vector<std::size_t> kept;
    std::vector<Leg> view;
    for (std::size_t i = 0; i < legs.size(); ++i)
      if (why[i] == Keep && legs[i].mc_kind == McKind::Tibanne) {
        kept.push_back(i);
        view.push_back(legs[i]);
      }
    std::set<std::string> uncorrectable;
    for (const auto& t : group_trades(view).trades) {
      Leg& b = legs[kept[t.buy]];
      Leg& s = legs[kept[t.sell]];
      if (b.currency == s.currency || b.money != s.money) continue;
      for (Leg* l : {&b, &s}) {
        auto it = idx.find({l->trade_id, l->currency});
        if (it == idx.end()) {
          l->uncorrectable = true;
          ++rep.tibanne_uncorrectable;
          uncorrectable.insert(l->trade_id);
          continue;
        }
        Decimal expected = (pub[it->second].price * l->bitcoins).rescaled(l->money.scale());
        double e = expected.to_double();
        if (e > 0 && std::fabs(l->money.to_double() - e) / e > opt.reconcile_tolerance) {
          l->money = expected;
          ++rep.tibanne_corrected;
        }
      }
    }
    r.uncorrectable_trades.assign(uncorrectable.begin(), uncorrectable.end());
  }

  auto remap = [&](const std::vector<UserId>& from, UserId to, std::size_t& counter, const char* what) {
    if (from.empty()) return;
    std::unordered_set<UserId> src(from.begin(), from.end());
    bool source_present = false, target_taken = false;
    for (std::size_t i = 0; i < legs.size(); ++i) {
      if (why[i] != Keep) continue;
      if (src.count(legs[i].user_id)) source_present = true;
      else if (legs[i].user_id == to) target_taken = true;
    }
    if (!source_present) return;
    if (target_taken)
      throw format_error("RemapCollision", std::string(what) + " target id " + std::to_string(to) + " already in use");
    for (std::size_t i = 0; i < legs.size(); ++i)
      if (why[i] == Keep && src.count(legs[i].user_id)) {
        legs[i].user_id = to;
        ++counter;
      }
  };
  remap({opt.markus_source}, opt.markus_target, rep.markus_remapped, "markus");
  remap(opt.willy_ids, opt.willy_target, rep.willy_remapped, "willy");

  for (std::size_t i = 0; i < legs.size(); ++i) {
    switch (why[i]) {
    case Keep: r.legs.push_back(std::move(legs[i])); break;
    case LastDay: ++rep.last_day; break;
    case Deleted: ++rep.deleted_users; break;
    case ZeroBtc: ++rep.zero_bitcoins; break;
    case Intermediary: ++rep.intermediary_rows; break;
    case ThkIncomplete: ++rep.thk_incomplete; break;
    case SelfTrade: ++rep.self_trades; break;
    }
  }
  rep.output_rows = r.legs.size();
  r.public_records = std::move(pub);
  return r;
}

Anonymized anonymize_users(std::vector<Leg> legs) {
  std::set<UserId> ids;
  for (const auto& l : legs)
    if (l.user_id >= 0) ids.insert(l.user_id);
  Anonymized a;
  UserId next = 1;
  for (UserId id : ids) a.mapping[id] = next++;
  for (auto& l : legs)
    if (l.user_id >= 0) l.user_id = a.mapping[l.user_id];
  a.legs = std::move(legs);
  return a;
}

std::vector<Leg> aggregate_same_second(std::span<const Leg> legs) {
  struct Key {
    UserId user;
    std::int64_t ts;
    Side side;
    Currency cur;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::size_t h = std::hash<UserId>{}(k.user);
      h = mix(h, std::hash<std::int64_t>{}(k.ts));
      return mix(h, static_cast<std::size_t>(k.side) * 64 + static_cast<std::size_t>(k.cur));
    }
  };
  std::unordered_map<Key, std::size_t, KeyHash> slot;
  std::vector<Leg> out;
  std::vector<std::vector<std::optional<bool>>> aggr;
  for (const auto& l : legs) {
    Key k{l.user_id, epoch_seconds(l.timestamp), l.side, l.currency};
    auto [it, fresh] = slot.try_emplace(k, out.size());
    if (fresh) {
      out.push_back(l);
      aggr.push_back({l.aggressive});
      continue;
    }
    Leg& m = out[it->second];
    m.trade_id += "+" + l.trade_id;
    m.member_count += l.member_count;
    m.bitcoins += l.bitcoins;
    m.money += l.money;
    m.money_jpy += l.money_jpy;
    m.money_fee += l.money_fee;
    m.money_fee_jpy += l.money_fee_jpy;
    m.bitcoin_fee += l.bitcoin_fee;
    m.bitcoin_fee_jpy += l.bitcoin_fee_jpy;
    m.uncorrectable = m.uncorrectable || l.uncorrectable;
    m.thk_primary_only = m.thk_primary_only || l.thk_primary_only;
    aggr[it->second].push_back(l.aggressive);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (aggr[i].size() == 1) continue;
    bool any_true = false, all_known = true;
    for (auto a : aggr[i]) {
      if (!a) all_known = false;
      else if (*a) any_true = true;
    }
    out[i].aggressive = any_true ? std::optional<bool>(true) : (all_known ? std::optional<bool>(false) : std::nullopt);
  }
  return out;
}

std::vector<Leg> restrict_sample(std::span<const Leg> legs, Instant cutoff) {
  std::vector<Leg> out;
  for (const auto& l : legs)
    if (l.timestamp < cutoff) out.push_back(l);
  return out;
}

MergeResult merge_public(std::vector<Leg> legs, std::span<const PublicTradeRecord> records) {
  auto idx = index_public(records);
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < records.size(); ++i) by_id.emplace(records[i].trade_id, i);
  MergeResult m;
  for (auto& l : legs) {
    std::string id(member_trade_ids(l.trade_id).front());
    const PublicTradeRecord* rec = nullptr;
    if (auto it = idx.find({id, l.currency}); it != idx.end()) rec = &records[it->second];
    else if (auto jt = by_id.find(id); jt != by_id.end()) rec = &records[jt->second];
    if (!rec) {
      ++m.misses;
      continue;
    }
    l.order_kind = rec->order_kind;
    bool initiating = (rec->initiator == Initiator::Bid && l.side == Side::Buy) ||
                      (rec->initiator == Initiator::Ask && l.side == Side::Sell);
    l.aggressive = is_market(rec->order_kind) && initiating;
  }
  m.legs = std::move(legs);
  return m;
}

std::map<Day, double> leaked_daily_usd_volume(std::span<const Leg> legs) {
  std::map<Day, double> vol;
  std::unordered_set<std::string_view> seen;
  for (const auto& l : legs) {
    if (l.currency != Currency::USD || l.is_intermediary()) continue;
    if (!seen.insert(l.trade_id).second) continue;
    vol[day_of(l.timestamp)] += l.money.to_double();
  }
  return vol;
}

std::vector<VolumeComparison> compare_daily_volumes(std::span<const Leg> legs, std::span<const DailyVolume> external,
                                                    int window_days) {
  auto leaked = leaked_daily_usd_volume(legs);
  std::map<Day, VolumeComparison> rows;
  for (auto [d, v] : leaked) {
    rows[d].day = d;
    rows[d].leaked = v;
  }
  for (const auto& e : external) {
    rows[e.day].day = e.day;
    rows[e.day].external += e.volume;
  }
  std::vector<VolumeComparison> out;
  for (auto& [d, r] : rows) {
    r.normalized_diff = r.leaked > 0 ? (r.leaked - r.external) / r.leaked : std::nan("");
    out.push_back(r);
  }
  const int half = window_days / 2;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double sum = 0;
    int n = 0;
    for (std::size_t j = 0; j < out.size(); ++j) {
      auto gap = (out[j].day - out[i].day).count();
      if (gap < -half || gap > half || std::isnan(out[j].normalized_diff)) continue;
      sum += out[j].normalized_diff;
      ++n;
    }
    out[i].moving_average = n ? sum / n : std::nan("");
  }
  return out;
}

} // namespace arbminer
