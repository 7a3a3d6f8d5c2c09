#include "arbminer/synth.hpp"

#include "arbminer/error.hpp"
#include "arbminer/ledger_io.hpp"
#include "arbminer/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <unordered_set>

namespace arbminer {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do x = engine_();
  while (x >= limit);
  return x % n;
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do u1 = uniform();
  while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

double reference_usd_rate(Currency c) {
  switch (c) {
  case Currency::USD: return 1.0;
  case Currency::EUR: return 1.30;
  case Currency::GBP: return 1.58;
  case Currency::PLN: return 0.31;
  case Currency::AUD: return 1.03;
  case Currency::JPY: return 0.0125;
  case Currency::CAD: return 1.00;
  case Currency::SEK: return 0.15;
  case Currency::CHF: return 1.07;
  case Currency::RUB: return 0.032;
  case Currency::CNY: return 0.16;
  case Currency::NZD: return 0.81;
  case Currency::SGD: return 0.80;
  case Currency::HKD: return 0.129;
  case Currency::DKK: return 0.175;
  case Currency::NOK: return 0.175;
  case Currency::THB: return 0.033;
  }
  return 1.0;
}

namespace {

// USD value of each currency on an hourly grid starting one hour before `start`.
struct RateWalk {
  Instant origin{};
  std::map<Currency, std::vector<double>> usd;

  double at(Currency c, Instant t) const {
    const auto& v = usd.at(c);
    auto k = (epoch_seconds(hour_floor(t)) - epoch_seconds(origin)) / 3600;
    k = std::clamp<std::int64_t>(k, 0, static_cast<std::int64_t>(v.size()) - 1);
    return v[static_cast<std::size_t>(k)];
  }
};

RateWalk walk_rates(std::uint64_t seed, std::vector<Currency> currencies, Instant start, Instant end, double vol) {
  if (end <= start) throw usage_error("InvalidSpec", "synthetic range is empty");
  std::sort(currencies.begin(), currencies.end());
  currencies.erase(std::unique(currencies.begin(), currencies.end()), currencies.end());
  RateWalk w;
  w.origin = hour_floor(start) - std::chrono::hours{1};
  const auto hours = static_cast<std::size_t>((epoch_seconds(end) - epoch_seconds(w.origin) + 3599) / 3600);
  Rng rng(seed);
  for (Currency c : currencies) {
    auto& v = w.usd[c];
    v.resize(hours);
    double x = std::log(reference_usd_rate(c));
    for (std::size_t h = 0; h < hours; ++h) {
      v[h] = c == Currency::USD ? 1.0 : std::exp(x);
      if (c != Currency::USD) x += vol * rng.normal();
    }
  }
  return w;
}

std::vector<RateBar> bars_of(const RateWalk& w, bool crosses) {
  std::vector<RateBar> out;
  std::vector<Currency> cs;
  for (const auto& [c, v] : w.usd) cs.push_back(c);
  const std::size_t hours = w.usd.empty() ? 0 : w.usd.begin()->second.size();
  auto emit = [&](Currency base, Currency quote) {
    for (std::size_t h = 0; h < hours; ++h) {
      Instant t = w.origin + std::chrono::hours{static_cast<long>(h)};
      out.push_back({base, quote, t, w.usd.at(base)[h] / w.usd.at(quote)[h]});
    }
  };
  for (Currency c : cs)
    if (c != Currency::USD) emit(c, Currency::USD);
  if (crosses)
    for (std::size_t i = 0; i < cs.size(); ++i)
      for (std::size_t j = i + 1; j < cs.size(); ++j)
        if (cs[i] != Currency::USD && cs[j] != Currency::USD) {
          Dyad d = Dyad::of(cs[i], cs[j]);
          emit(d.first, d.second);
        }
  return out;
}

constexpr std::int64_t kBurstGap = 30;

struct Skeleton {
  Instant t{};
  std::string id;
  std::vector<Leg> rows;
};

struct LedgerBuilder {
  const SynthConfig& cfg;
  Rng rng;
  RateWalk rates;
  std::vector<double> btc_usd; // hourly, same grid as the rate walk
  std::unordered_set<std::string> ids;
  std::set<std::tuple<UserId, std::int64_t, int, Decimal::Rep>> keys;
  std::int64_t range_lo = 0, range_hi = 0; // seconds, inclusive

  LedgerBuilder(const SynthConfig& c, RateWalk w) : cfg(c), rng(c.seed), rates(std::move(w)) {
    Rng price_rng(c.seed ^ 0x9e3779b97f4a7c15ULL);
    const std::size_t hours = rates.usd.begin()->second.size();
    btc_usd.resize(hours);
    double x = std::log(5.0);
    for (std::size_t h = 0; h < hours; ++h) {
      btc_usd[h] = std::exp(x);
      x += 0.005 * price_rng.normal();
    }
    range_lo = epoch_seconds(c.start);
    // Nothing on the final calendar day: the sanity filter drops it.
    range_hi = epoch_seconds(Instant{day_of(c.end - std::chrono::seconds{1})}) - 1;
    if (range_hi <= range_lo) throw usage_error("InvalidSpec", "synthetic range must span more than one day");
  }

  double price(Currency c, Instant t) const {
    auto k = (epoch_seconds(hour_floor(t)) - epoch_seconds(rates.origin)) / 3600;
    k = std::clamp<std::int64_t>(k, 0, static_cast<std::int64_t>(btc_usd.size()) - 1);
    return btc_usd[static_cast<std::size_t>(k)] / rates.at(c, t);
  }

  Instant random_time() { return from_epoch_seconds(rng.between(range_lo, range_hi)); }

  std::string new_id(Instant t) {
    for (;;) {
      std::string micro = std::to_string(rng.below(1000000));
      std::string id = std::to_string(epoch_seconds(t)) + std::string(6 - micro.size(), '0') + micro;
      if (ids.insert(id).second) return id;
    }
  }

  Decimal random_btc() {
    double v = std::exp(rng.uniform(std::log(0.01), std::log(50.0)));
    return Decimal::from_double(v, 8);
  }

  bool key_free(UserId u, Instant t, Side s, const Decimal& btc) const {
    return !keys.count({u, epoch_seconds(t), static_cast<int>(s), btc.mantissa_at(8)});
  }
  void claim(UserId u, Instant t, Side s, const Decimal& btc) {
    keys.insert({u, epoch_seconds(t), static_cast<int>(s), btc.mantissa_at(8)});
  }

  Leg make_leg(const std::string& id, Instant t, UserId u, Side s, Currency c, const Decimal& btc, double unit_price,
               McKind kind) {
    Leg l;
    l.trade_id = id;
    l.timestamp = t;
    l.user_id = u;
    l.side = s;
    l.currency = c;
    l.bitcoins = btc;
    l.money = Decimal::from_double(btc.to_double() * unit_price, 5);
    set_jpy(l);
    l.japan = JapanFlag::NJP;
    l.mc_kind = kind;
    return l;
  }

  void set_jpy(Leg& l) const {
    const double jpy_per_unit = rates.at(l.currency, l.timestamp) / rates.at(Currency::JPY, l.timestamp);
    l.money_rate = Decimal::from_double(jpy_per_unit, 5);
    l.money_fee_rate = l.money_rate;
    l.money_jpy = (l.money * l.money_rate).rescaled(5);
  }

  std::size_t currency_slot(Currency c) const {
    return static_cast<std::size_t>(std::find(cfg.currencies.begin(), cfg.currencies.end(), c) - cfg.currencies.begin());
  }

  Currency random_currency() {
    // USD carries most of the flow.
    if (rng.chance(0.6) && std::find(cfg.currencies.begin(), cfg.currencies.end(), Currency::USD) != cfg.currencies.end())
      return Currency::USD;
    return cfg.currencies[rng.below(cfg.currencies.size())];
  }

  std::pair<UserId, UserId> two_noise_users(Currency c) {
    const auto n = cfg.n_noise_users_per_currency;
    const UserId base = 1 + static_cast<UserId>(currency_slot(c) * n);
    UserId a = base + static_cast<UserId>(rng.below(n));
    UserId b;
    do b = base + static_cast<UserId>(rng.below(n));
    while (b == a);
    return {a, b};
  }

  UserId whale(Currency c) const { return 1 + static_cast<UserId>(currency_slot(c) * cfg.n_noise_users_per_currency); }

  UserId arbitrageur(std::size_t k) const {
    return 1 + static_cast<UserId>(cfg.currencies.size() * cfg.n_noise_users_per_currency + k);
  }

  Skeleton standard_trade(Instant t) {
    for (;;) {
      Currency c = random_currency();
      auto [buyer, seller] = two_noise_users(c);
      Decimal btc = random_btc();
      if (rng.chance(cfg.whale_share)) {
        buyer = whale(c);
        if (seller == buyer) continue;
        btc = Decimal::from_double(std::exp(rng.uniform(std::log(10.0), std::log(2000.0))), 8);
      }
      if (!key_free(buyer, t, Side::Buy, btc) || !key_free(seller, t, Side::Sell, btc)) continue;
      claim(buyer, t, Side::Buy, btc);
      claim(seller, t, Side::Sell, btc);
      Skeleton s{t, new_id(t), {}};
      double p = price(c, t) * (1.0 + 0.002 * rng.normal());
      s.rows.push_back(make_leg(s.id, t, buyer, Side::Buy, c, btc, p, McKind::Standard));
      s.rows.push_back(make_leg(s.id, t, seller, Side::Sell, c, btc, p, McKind::Standard));
      return s;
    }
  }

  Skeleton multi_currency_trade(Instant t, std::vector<std::string>& copy_errors) {
    auto ym = std::chrono::year_month_day{day_of(t)};
    auto fam = family_for_month(static_cast<int>(ym.year()), static_cast<unsigned>(ym.month()));
    McKind kind = fam ? scheme_of(*fam) : McKind::Standard;
    if (kind == McKind::Standard || cfg.currencies.size() < 2) return standard_trade(t);
    for (;;) {
      Currency c1 = cfg.currencies[rng.below(cfg.currencies.size())];
      Currency c2 = cfg.currencies[rng.below(cfg.currencies.size())];
      if (c1 == c2) continue;
      UserId u1 = two_noise_users(c1).first;
      UserId u2 = two_noise_users(c2).first;
      Decimal btc = random_btc();
      const UserId mid = kind == McKind::Tibanne ? kTibanneUser : kThkUser;
      if (!key_free(u1, t, Side::Buy, btc) || !key_free(mid, t, Side::Sell, btc)) continue;
      if (kind == McKind::Tibanne && (!key_free(u2, t, Side::Sell, btc) || !key_free(mid, t, Side::Buy, btc))) continue;
      Skeleton s{t, new_id(t), {}};
      const double p1 = price(c1, t), p2 = price(c2, t);
      claim(u1, t, Side::Buy, btc);
      claim(mid, t, Side::Sell, btc);
      s.rows.push_back(make_leg(s.id, t, u1, Side::Buy, c1, btc, p1, kind));
      s.rows.push_back(make_leg(s.id, t, mid, Side::Sell, c1, btc, p1, kind));
      if (kind == McKind::Tibanne) {
        claim(u2, t, Side::Sell, btc);
        claim(mid, t, Side::Buy, btc);
        Leg sell = make_leg(s.id, t, u2, Side::Sell, c2, btc, p2, kind);
        if (rng.chance(cfg.tibanne_copy_error_share)) {
          sell.money = s.rows[0].money;
          set_jpy(sell);
          copy_errors.push_back(s.id);
        }
        s.rows.push_back(sell);
        s.rows.push_back(make_leg(s.id, t, mid, Side::Buy, c2, btc, p2, kind));
      }
      // THK trades are emitted with their primary leg only, as the ledger reports them.
      return s;
    }
  }
};

std::vector<double> reference_fee_row(const FeeFeatures& f) { return fee_design_row(f, 5, VolumeScale::Log); }

} // namespace

std::vector<RateBar> gen_rates(const RateSynthConfig& cfg) {
  auto cs = cfg.currencies;
  cs.push_back(Currency::USD);
  return bars_of(walk_rates(cfg.seed, cs, cfg.start, cfg.end, cfg.hourly_volatility), cfg.direct_crosses);
}

std::vector<double> reference_fee_coefficients() {
  return {0.561, -0.001, 0.152, -0.212, -0.037, -0.006, 0.158, -0.170, -0.191};
}

SynthLedger gen_ledger(const SynthConfig& cfg) {
  if (cfg.currencies.size() < 2) throw usage_error("InvalidSpec", "synthetic ledger needs at least two currencies");
  if (cfg.n_noise_users_per_currency < 2) throw usage_error("InvalidSpec", "need two noise users per currency");
  if (cfg.planted_max_dq < 0 || cfg.planted_max_dq >= 200 || cfg.planted_max_dt < 0)
    throw usage_error("InvalidSpec", "planted envelope out of range");
  if (cfg.n_planted_actions > 0 && cfg.n_arbitrageurs == 0)
    throw usage_error("InvalidSpec", "planted actions need at least one arbitrageur");

  auto walk_cs = cfg.currencies;
  walk_cs.push_back(Currency::USD);
  walk_cs.push_back(Currency::JPY);
  RateWalk walk = walk_rates(cfg.seed + 1, walk_cs, cfg.start, cfg.end, cfg.hourly_volatility);

  SynthLedger out;
  {
    auto cs = cfg.currencies;
    cs.push_back(Currency::USD);
    RateWalk shown;
    shown.origin = walk.origin;
    for (Currency c : cs) shown.usd[c] = walk.usd.at(c);
    out.rates = bars_of(shown, true);
  }

  LedgerBuilder b(cfg, std::move(walk));
  std::vector<Skeleton> trades;

  // Planted actions sit in disjoint slots per arbitrageur, so no two of a
  // user's actions can come within the planted window of each other. Burst
  // actions share a slot; their sizes differ by half so they cannot pair up
  // across actions.
  if (cfg.n_planted_actions > 0) {
    const std::size_t n_arb = cfg.n_arbitrageurs;
    auto multi_market = [&](std::size_t a) { return a % 2 == 0 && cfg.currencies.size() >= 3; };

    // Arbitrageur a gets a share proportional to a + 1.
    std::vector<std::size_t> count(n_arb), bursts(n_arb, 0);
    const std::size_t weight_sum = n_arb * (n_arb + 1) / 2;
    std::size_t assigned = 0;
    for (std::size_t a = 0; a < n_arb; ++a) assigned += count[a] = cfg.n_planted_actions * (a + 1) / weight_sum;
    for (std::size_t a = n_arb; assigned < cfg.n_planted_actions; a = a == 0 ? n_arb : a) {
      ++count[--a];
      ++assigned;
    }
    for (std::size_t k = 0, a = 0, idle = 0; k < cfg.metaorder_bursts; a = (a + 1) % n_arb) {
      if (multi_market(a) && count[a] >= 5 * (bursts[a] + 1)) {
        ++bursts[a];
        ++k;
        idle = 0;
      } else if (++idle > n_arb) {
        throw usage_error("InfeasibleConfig", "not enough planted actions for the requested metaorder bursts");
      }
    }

    const std::int64_t slot = cfg.separation + 2 * cfg.planted_max_dt + 4 * kBurstGap + 1;
    const std::int64_t n_slots = (b.range_hi - b.range_lo + 1) / slot;
    std::size_t per_user = 0;
    for (std::size_t a = 0; a < n_arb; ++a) per_user = std::max(per_user, count[a] - 4 * bursts[a]);
    if (n_slots < static_cast<std::int64_t>(per_user))
      throw usage_error("InfeasibleConfig", "date range too short for " + std::to_string(per_user) +
                                               " separated actions per arbitrageur");
    std::vector<std::int64_t> pool(static_cast<std::size_t>(n_slots));
    for (std::int64_t i = 0; i < n_slots; ++i) pool[static_cast<std::size_t>(i)] = i;
    if (cfg.planted_slot_pool > 0) {
      if (cfg.planted_slot_pool < per_user || cfg.planted_slot_pool > pool.size())
        throw usage_error("InfeasibleConfig", "slot pool must hold every arbitrageur's actions and fit the range");
      for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[b.rng.below(i)]);
      pool.resize(cfg.planted_slot_pool);
    }
    std::vector<std::pair<Currency, Currency>> home_dyad(n_arb);
    for (auto& d : home_dyad) {
      d.first = cfg.currencies[b.rng.below(cfg.currencies.size())];
      do d.second = cfg.currencies[b.rng.below(cfg.currencies.size())];
      while (d.second == d.first);
    }
    const Decimal max_dq = Decimal::from_double(cfg.planted_max_dq, 6);

    auto plant = [&](std::size_t a, Currency cb, Currency cs, std::int64_t t_first, std::int64_t dt, bool buy_first,
                     const Decimal& btc_b) {
      const UserId user = b.arbitrageur(a);
      Instant tb = from_epoch_seconds(buy_first ? t_first : t_first + dt);
      Instant ts = from_epoch_seconds(buy_first ? t_first + dt : t_first);
      const double x = b.rng.uniform(0.0, cfg.planted_max_dq / 100.0);
      Decimal btc_s = Decimal::from_double(btc_b.to_double() * (1.0 + x), 8);
      if (!VolumeGap::of(btc_b, btc_s).within(max_dq)) return false;
      UserId cp_b = b.two_noise_users(cb).first;
      UserId cp_s = b.two_noise_users(cs).first;
      if (!b.key_free(user, tb, Side::Buy, btc_b) || !b.key_free(cp_b, tb, Side::Sell, btc_b) ||
          !b.key_free(user, ts, Side::Sell, btc_s) || !b.key_free(cp_s, ts, Side::Buy, btc_s))
        return false;
      b.claim(user, tb, Side::Buy, btc_b);
      b.claim(cp_b, tb, Side::Sell, btc_b);
      b.claim(user, ts, Side::Sell, btc_s);
      b.claim(cp_s, ts, Side::Buy, btc_s);
      Skeleton buy{tb, b.new_id(tb), {}};
      Skeleton sell{ts, b.new_id(ts), {}};
      double pb = b.price(cb, tb) * (1.0 + cfg.planted_spread_sd / 100.0 * b.rng.normal());
      double ps = b.price(cs, ts) * (1.0 + cfg.planted_spread_sd / 100.0 * b.rng.normal());
      if (multi_market(a)) ps *= 1.0 + cfg.skill_premium / 100.0;
      buy.rows.push_back(b.make_leg(buy.id, tb, user, Side::Buy, cb, btc_b, pb, McKind::Standard));
      buy.rows.push_back(b.make_leg(buy.id, tb, cp_b, Side::Sell, cb, btc_b, pb, McKind::Standard));
      sell.rows.push_back(b.make_leg(sell.id, ts, cp_s, Side::Buy, cs, btc_s, ps, McKind::Standard));
      sell.rows.push_back(b.make_leg(sell.id, ts, user, Side::Sell, cs, btc_s, ps, McKind::Standard));
      out.truth.planted.push_back({user, buy.id, sell.id});
      trades.push_back(std::move(buy));
      trades.push_back(std::move(sell));
      return true;
    };
    auto pick_pair = [&](std::size_t a) {
      if (!multi_market(a)) {
        auto [x, y] = home_dyad[a];
        return b.rng.chance(0.5) ? std::pair{y, x} : std::pair{x, y};
      }
      Currency x = cfg.currencies[b.rng.below(cfg.currencies.size())], y;
      do y = cfg.currencies[b.rng.below(cfg.currencies.size())];
      while (y == x);
      return std::pair{x, y};
    };

    for (std::size_t a = 0; a < n_arb; ++a) {
      auto slots = pool;
      for (std::size_t i = slots.size(); i > 1; --i) std::swap(slots[i - 1], slots[b.rng.below(i)]);
      std::size_t next = 0;
      for (std::size_t k = 0; k < bursts[a]; ++k) {
        const std::int64_t start = b.range_lo + slots[next++] * slot + b.rng.between(0, cfg.planted_max_dt);
        auto [cb, cs] = pick_pair(a);
        const double base = std::exp(b.rng.uniform(std::log(0.05), std::log(5.0)));
        for (int j = 0; j < 5; ++j) {
          const Decimal btc = Decimal::from_double(base * std::pow(1.5, j), 8);
          while (!plant(a, cb, cs, start + j * kBurstGap, b.rng.between(0, kBurstGap / 2), b.rng.chance(0.5), btc)) {
          }
        }
      }
      for (std::size_t k = 5 * bursts[a]; k < count[a]; ++k) {
        const std::int64_t start = b.range_lo + slots[next++] * slot + b.rng.between(0, cfg.planted_max_dt);
        auto [cb, cs] = pick_pair(a);
        while (!plant(a, cb, cs, start, b.rng.between(0, cfg.planted_max_dt), b.rng.chance(0.5), b.random_btc())) {
        }
      }
    }
  }

  out.truth.regression_names = {"D(Currencies)"};
  out.truth.regression_coefficients = {cfg.currencies.size() >= 3 ? cfg.skill_premium : 0.0};

  for (std::size_t k = 0; k < cfg.n_noise_trades; ++k) {
    Instant t = b.random_time();
    if (b.rng.chance(cfg.multi_currency_share)) trades.push_back(b.multi_currency_trade(t, out.truth.tibanne_copy_errors));
    else trades.push_back(b.standard_trade(t));
  }

  std::stable_sort(trades.begin(), trades.end(),
                   [](const Skeleton& x, const Skeleton& y) { return std::tie(x.t, x.id) < std::tie(y.t, y.id); });
  std::vector<std::size_t> first_row;
  for (auto& s : trades) {
    first_row.push_back(out.base_legs.size());
    for (auto& r : s.rows) out.base_legs.push_back(std::move(r));
  }

  // Fees follow the reference schedule on each user's trailing volume.
  out.truth.fee_names = fee_design_names(5, VolumeScale::Log);
  out.truth.fee_coefficients = reference_fee_coefficients();
  {
    auto vol = rolling_volume_720h(out.base_legs);
    for (std::size_t i = 0; i < out.base_legs.size(); ++i) {
      Leg& l = out.base_legs[i];
      if (l.is_intermediary() || b.rng.chance(cfg.zero_fee_share)) continue;
      auto row = reference_fee_row(FeeFeatures::make(vol[i], day_of(l.timestamp)));
      double pct = cfg.fee_noise * b.rng.normal();
      for (std::size_t j = 0; j < row.size(); ++j) pct += row[j] * out.truth.fee_coefficients[j];
      pct = std::clamp(pct, 0.01, 0.99);
      if (l.side == Side::Buy) {
        l.bitcoin_fee = Decimal::from_double(l.bitcoins.to_double() * pct / 100.0, 8);
        l.bitcoin_fee_jpy = Decimal::from_double(l.bitcoin_fee.to_double() / l.bitcoins.to_double() *
                                                     l.money_jpy.to_double(), 5);
      } else {
        l.money_fee = Decimal::from_double(l.money.to_double() * pct / 100.0, 5);
        l.money_fee_jpy = (l.money_fee * l.money_fee_rate).rescaled(5);
      }
    }
  }

  for (std::size_t k = 0; k < trades.size(); ++k) {
    const Skeleton& s = trades[k];
    if (s.rows.size() > 0 && s.rows[0].mc_kind == McKind::THK) continue;
    std::vector<const Leg*> principal;
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
      const Leg& l = out.base_legs[first_row[k] + r];
      if (!l.is_intermediary()) principal.push_back(&l);
    }
    std::set<Currency> seen;
    for (const Leg* l : principal) {
      if (!seen.insert(l->currency).second) continue;
      PublicTradeRecord p;
      p.trade_id = s.id;
      p.timestamp = s.t;
      p.currency = l->currency;
      p.amount = l->bitcoins;
      double unit = b.price(l->currency, s.t);
      // The copied fiat figure is wrong; the public tape keeps the true price.
      if (l->mc_kind != McKind::Tibanne) unit = l->money.to_double() / l->bitcoins.to_double();
      if ((l->currency == Currency::SEK || l->currency == Currency::JPY) && s.t < make_instant(2013, 9, 12))
        unit *= 100.0;
      p.price = Decimal::from_double(unit, 5);
      p.order_kind = b.rng.chance(cfg.market_order_share) ? OrderKind::Market : OrderKind::Limit;
      p.initiator = b.rng.chance(0.5) ? Initiator::Bid : Initiator::Ask;
      out.public_records.push_back(p);
    }
  }

  // Exact copies of whole trades, each placed after its original.
  out.legs = out.base_legs;
  std::vector<char> injected(out.legs.size(), 0);
  const auto n_dup = static_cast<std::size_t>(std::floor(cfg.duplicate_rate * static_cast<double>(trades.size())));
  std::vector<std::size_t> order(trades.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[b.rng.below(i)]);
  for (std::size_t d = 0; d < n_dup && d < order.size(); ++d) {
    const std::string& id = trades[order[d]].id;
    std::vector<Leg> block;
    std::size_t last = 0;
    for (std::size_t i = 0; i < out.legs.size(); ++i)
      if (!injected[i] && out.legs[i].trade_id == id) {
        block.push_back(out.legs[i]);
        last = i;
      }
    const std::size_t at = last + 1 + b.rng.below(out.legs.size() - last);
    out.legs.insert(out.legs.begin() + static_cast<std::ptrdiff_t>(at), block.begin(), block.end());
    injected.insert(injected.begin() + static_cast<std::ptrdiff_t>(at), block.size(), 1);
  }
  for (std::size_t i = 0; i < out.legs.size(); ++i)
    if (injected[i]) out.truth.duplicate_rows.push_back(i);
  return out;
}

std::vector<FeeObservation> gen_fee_data(const FeeSynthConfig& cfg) {
  if (cfg.beta.size() != fee_design_names(5).size()) throw usage_error("InvalidSpec", "fee beta must have 9 entries");
  Rng rng(cfg.seed);
  std::vector<FeeObservation> out;
  out.reserve(cfg.n);
  const Day lo = make_day(2011, 4, 1);
  const auto span = (make_day(2013, 11, 30) - lo).count();
  while (out.size() < cfg.n) {
    const double volume = std::exp(rng.uniform(0.0, std::log(60000.0)));
    const Day d = lo + std::chrono::days{rng.between(0, span)};
    FeeObservation o{FeeFeatures::make(volume, d), 0.0};
    auto row = reference_fee_row(o.features);
    for (std::size_t j = 0; j < row.size(); ++j) o.fee_pct += row[j] * cfg.beta[j];
    o.fee_pct += cfg.noise_sd * rng.normal();
    out.push_back(o);
  }
  return out;
}

LogitSample gen_logit_data(const LogitSynthConfig& cfg) {
  if (cfg.beta.empty()) throw usage_error("InvalidSpec", "logit beta is empty");
  Rng rng(cfg.seed);
  const auto n = static_cast<Eigen::Index>(cfg.n);
  const auto k = static_cast<Eigen::Index>(cfg.beta.size());
  LogitSample s{Eigen::MatrixXd(n, k), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    double eta = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      // Alternate continuous and binary regressors after the intercept.
      double v = j == 0 ? 1.0 : (j % 2 == 1 ? rng.normal() : (rng.chance(0.3) ? 1.0 : 0.0));
      s.X(i, j) = v;
      eta += v * cfg.beta[static_cast<std::size_t>(j)];
    }
    s.y(i) = rng.uniform() < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
  }
  return s;
}

RegressionSynth gen_regression_data(const RegressionSynthConfig& cfg) {
  if (cfg.n_users < 2 || cfg.n_dyads < 1 || cfg.n_hours < 1) throw usage_error("InvalidSpec", "empty panel");
  Rng rng(cfg.seed);
  std::vector<double> proxy(cfg.n_users), user_fe(cfg.n_users), user_shock(cfg.n_users), user_slope(cfg.n_users);
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    proxy[u] = rng.chance(0.4) ? 1.0 : 0.0;
    user_fe[u] = cfg.fe_sd * rng.normal() + 0.3 * proxy[u];
    user_shock[u] = cfg.cluster_sd * rng.normal();
    user_slope[u] = cfg.cluster_sd * rng.normal();
  }
  std::vector<double> dyad_fe(cfg.n_dyads), hour_fe(cfg.n_hours);
  for (auto& v : dyad_fe) v = cfg.fe_sd * rng.normal();
  for (auto& v : hour_fe) v = cfg.fe_sd * rng.normal();
  std::vector<double> dr(cfg.n_dyads * cfg.n_hours);
  for (auto& v : dr) v = rng.normal();

  RegressionSynth out;
  for (std::size_t i = 0; i < cfg.n_rows; ++i) {
    RegressionRow r;
    const auto u = static_cast<std::size_t>(rng.below(cfg.n_users));
    const auto d = static_cast<std::size_t>(rng.below(cfg.n_dyads));
    const auto h = static_cast<std::size_t>(rng.below(cfg.n_hours));
    r.user = static_cast<UserId>(u + 1);
    r.dyad = static_cast<int>(d);
    r.hour = static_cast<std::int64_t>(h);
    r.proxy = proxy[u];
    r.usd = std::exp(rng.normal()) / 2.0;
    double y = hour_fe[h] + dyad_fe[d] + cfg.beta_usd * r.usd + cfg.noise_sd * rng.normal();
    if (cfg.interaction) {
      const double x = dr[d * cfg.n_hours + h];
      r.delta_r = x;
      y += cfg.beta_inter * x * r.proxy + cfg.beta_dr * x + user_fe[u] + user_slope[u] * x;
    } else {
      y += cfg.beta_const + cfg.beta_proxy * r.proxy + user_shock[u];
    }
    r.spread = y;
    out.rows.push_back(r);
  }
  if (cfg.interaction) {
    out.truth.regression_names = {std::string(kDeltaRLabel) + " x proxy", kDeltaRLabel, kUsdLabel};
    out.truth.regression_coefficients = {cfg.beta_inter, cfg.beta_dr, cfg.beta_usd};
  } else {
    out.truth.regression_names = {"Constant", "proxy", kUsdLabel};
    out.truth.regression_coefficients = {cfg.beta_const, cfg.beta_proxy, cfg.beta_usd};
  }
  return out;
}

} // namespace arbminer
