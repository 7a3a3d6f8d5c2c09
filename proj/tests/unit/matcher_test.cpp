#include "arbminer/oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace arbtest;

namespace {

std::vector<std::pair<std::size_t, std::size_t>> pairs_of(const std::vector<ArbitrageAction>& acts) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& a : acts) out.emplace_back(a.buy, a.sell);
  return out;
}

std::vector<Leg> two_legs(const std::string& t_sell, const std::string& q_buy, const std::string& q_sell) {
  return {leg("1", "2012-05-01 10:00:00", 1, Side::Buy, Currency::USD, q_buy, "10"),
          leg("2", t_sell, 1, Side::Sell, Currency::EUR, q_sell, "10")};
}

} // namespace

TEST(Matcher, IllustrationYieldsSingleAction) {
  auto legs = fig3_fixture();
  auto acts = match_ledger(legs, fig3_config());
  ASSERT_EQ(acts.size(), 1u);
  const Leg& b = legs[acts[0].buy];
  const Leg& s = legs[acts[0].sell];
  EXPECT_EQ(s.currency, Currency::USD);
  EXPECT_EQ(s.bitcoins, dec("2.5"));
  EXPECT_EQ(b.currency, Currency::GBP);
  EXPECT_EQ(b.bitcoins, dec("3.5"));
  EXPECT_EQ(acts[0].delta_t, 80);
  EXPECT_NEAR(acts[0].delta_q, 100.0 / 3.0, 1e-12);
  EXPECT_EQ(acts[0].dyad, Dyad::of(Currency::USD, Currency::GBP));
  EXPECT_EQ(acts[0].execution_time, s.timestamp);
}

TEST(Matcher, ThresholdsAreInclusive) {
  MatchConfig cfg;
  EXPECT_EQ(match_ledger(two_legs("2012-05-01 10:05:00", "1", "1"), cfg).size(), 1u);
  EXPECT_EQ(match_ledger(two_legs("2012-05-01 10:05:01", "1", "1"), cfg).size(), 0u);
  // |1.05 - 0.95| over the mean 1.0 is exactly ten percent.
  EXPECT_EQ(match_ledger(two_legs("2012-05-01 10:00:00", "1.05", "0.95"), cfg).size(), 1u);
  EXPECT_EQ(match_ledger(two_legs("2012-05-01 10:00:00", "1.05000001", "0.95"), cfg).size(), 0u);
  EXPECT_TRUE(VolumeGap::of(dec("1.05"), dec("0.95")).within(dec("10")));
  EXPECT_TRUE(VolumeGap::of(dec("1.05"), dec("0.95")).within(dec("10.000")));
  EXPECT_FALSE(VolumeGap::of(dec("1.05"), dec("0.95")).within(dec("9.99")));
  EXPECT_NEAR(VolumeGap::of(dec("1.1"), dec("0.9")).percent(), 20.0, 1e-12);
}

TEST(Matcher, RequiresDistinctCurrencyTradeAndSide) {
  MatchConfig cfg;
  auto same_cur = two_legs("2012-05-01 10:00:10", "1", "1");
  same_cur[1].currency = Currency::USD;
  same_cur.push_back(leg("9", "2012-06-01 00:00:00", 1, Side::Buy, Currency::GBP, "1", "1"));
  EXPECT_TRUE(match_ledger(same_cur, cfg).empty());
  auto same_trade = two_legs("2012-05-01 10:00:10", "1", "1");
  same_trade[1].trade_id = "1";
  EXPECT_TRUE(match_ledger(same_trade, cfg).empty());
  auto shared_member = two_legs("2012-05-01 10:00:10", "1", "1");
  shared_member[0].trade_id = "5+1";
  shared_member[1].trade_id = "7+1";
  EXPECT_TRUE(match_ledger(shared_member, cfg).empty());
  auto same_side = two_legs("2012-05-01 10:00:10", "1", "1");
  same_side[1].side = Side::Buy;
  EXPECT_TRUE(match_ledger(same_side, cfg).empty());
  auto other_user = two_legs("2012-05-01 10:00:10", "1", "1");
  other_user[1].user_id = 2;
  EXPECT_TRUE(match_ledger(other_user, cfg).empty());
}

TEST(Matcher, EarliestLegTakesClosestPartner) {
  // Delay decides first: the sell at t=10 beats the better-sized one at t=20.
  std::vector<Leg> legs = {leg("1", "2012-05-01 10:00:00", 1, Side::Buy, Currency::USD, "1", "1"),
                           leg("2", "2012-05-01 10:00:20", 1, Side::Sell, Currency::EUR, "1", "1"),
                           leg("3", "2012-05-01 10:00:10", 1, Side::Sell, Currency::GBP, "1.05", "1")};
  auto acts = match_ledger(legs, {});
  ASSERT_EQ(acts.size(), 1u);
  EXPECT_EQ(acts[0].sell, 2u);
  // With equal delays the smaller volume gap wins.
  legs[1].timestamp = legs[2].timestamp;
  acts = match_ledger(legs, {});
  ASSERT_EQ(acts.size(), 1u);
  EXPECT_EQ(acts[0].sell, 1u);
  // Full tie falls back to the partner's trade id.
  legs[2].bitcoins = dec("1");
  legs[1].trade_id = "4";
  acts = match_ledger(legs, {});
  ASSERT_EQ(acts.size(), 1u);
  EXPECT_EQ(acts[0].sell, 2u);
}

TEST(MatcherProperty, ActionsRespectEveryConstraint) {
  Rng rng(2024);
  for (int inst = 0; inst < 150; ++inst) {
    auto legs = random_match_instance(rng, 1 + rng.below(300));
    MatchConfig cfg{static_cast<std::int64_t>(rng.between(1, 600)), Decimal(static_cast<long long>(rng.between(1, 25)))};
    auto acts = match_ledger(legs, cfg);
    std::set<std::size_t> used;
    for (const auto& a : acts) {
      const Leg& b = legs[a.buy];
      const Leg& s = legs[a.sell];
      ASSERT_EQ(b.side, Side::Buy);
      ASSERT_EQ(s.side, Side::Sell);
      ASSERT_EQ(b.user_id, s.user_id);
      ASSERT_NE(b.currency, s.currency);
      ASSERT_FALSE(share_trade(b, s));
      ASSERT_LE(a.delta_t, cfg.max_delta_t);
      ASSERT_LE(a.delta_q, cfg.max_delta_q.to_double() + 1e-9);
      ASSERT_TRUE(used.insert(a.buy).second);
      ASSERT_TRUE(used.insert(a.sell).second);
    }
    // Greedy leaves no candidate pair with both legs free.
    std::map<UserId, std::vector<std::size_t>> by_user;
    for (std::size_t i = 0; i < legs.size(); ++i) by_user[legs[i].user_id].push_back(i);
    for (const auto& [u, idx] : by_user)
      for (const auto& c : enumerate_candidates(legs, idx, cfg))
        ASSERT_TRUE(used.count(c.buy) || used.count(c.sell));
  }
}

TEST(MatcherProperty, AgreesWithBruteForce) {
  Rng rng(77);
  for (int inst = 0; inst < 200; ++inst) {
    auto legs = random_match_instance(rng, 1 + rng.below(200));
    MatchConfig cfg{static_cast<std::int64_t>(rng.between(0, 400)), Decimal(static_cast<long long>(rng.between(0, 30)))};
    ASSERT_EQ(pairs_of(match_ledger(legs, cfg)), pairs_of(brute_force_match(legs, cfg))) << "instance " << inst;
  }
}

TEST(MatcherProperty, InputOrderDoesNotMatter) {
  Rng rng(5);
  for (int inst = 0; inst < 50; ++inst) {
    auto legs = random_match_instance(rng, 150);
    // Unique ids make the tie-breaks independent of position.
    for (std::size_t i = 0; i < legs.size(); ++i) legs[i].trade_id = std::to_string(1000 + i);
    auto shuffled = legs;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    auto key = [](const std::vector<Leg>& l, const std::vector<ArbitrageAction>& acts) {
      std::vector<std::pair<std::string, std::string>> out;
      for (const auto& a : acts) out.emplace_back(l[a.buy].trade_id, l[a.sell].trade_id);
      std::sort(out.begin(), out.end());
      return out;
    };
    EXPECT_EQ(key(legs, match_ledger(legs, {})), key(shuffled, match_ledger(shuffled, {})));
  }
}

TEST(MatcherProperty, CandidateCountGrowsWithThresholds) {
  Rng rng(8);
  auto legs = random_match_instance(rng, 400);
  std::vector<std::int64_t> dts = {30, 300, 600};
  std::vector<Decimal> dqs = {Decimal(1), Decimal(10), Decimal(20)};
  auto cells = sweep_thresholds(legs, dts, dqs);
  ASSERT_EQ(cells.size(), 9u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& c = cells[i * 3 + j];
      if (i > 0) EXPECT_GE(c.candidates, cells[(i - 1) * 3 + j].candidates);
      if (j > 0) EXPECT_GE(c.candidates, cells[i * 3 + j - 1].candidates);
      EXPECT_EQ(c.actions, match_ledger(legs, {c.max_delta_t, c.max_delta_q}).size());
    }
}

TEST(Matcher, EligibilityNeedsTwoCurrencies) {
  std::vector<Leg> legs = {leg("1", "2012-05-01 10:00:00", 1, Side::Buy, Currency::USD, "1", "1"),
                           leg("2", "2012-05-01 10:00:00", 1, Side::Sell, Currency::USD, "1", "1"),
                           leg("3", "2012-05-01 10:00:00", 2, Side::Sell, Currency::USD, "1", "1"),
                           leg("4", "2012-05-01 10:00:00", 2, Side::Sell, Currency::EUR, "1", "1")};
  EXPECT_EQ(eligible_users(legs), std::vector<UserId>{2});
}
