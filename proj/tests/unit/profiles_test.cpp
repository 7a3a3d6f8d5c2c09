#include "arbminer/error.hpp"
#include "arbminer/profiles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace arbtest;

namespace {

// Appends one action's two legs for `user` at `t` seconds after the origin.
ArbitrageAction add_action(std::vector<Leg>& legs, UserId user, std::int64_t t, Currency buy, Currency sell,
                           const std::string& btc = "1") {
  const Instant origin = make_instant(2012, 5, 1);
  std::string id = std::to_string(legs.size());
  Leg b = leg("b" + id, "2012-05-01 00:00:00", user, Side::Buy, buy, btc, "10");
  Leg s = leg("s" + id, "2012-05-01 00:00:00", user, Side::Sell, sell, btc, "10");
  b.timestamp = s.timestamp = origin + std::chrono::seconds{t};
  legs.push_back(b);
  legs.push_back(s);
  return make_action(legs, legs.size() - 2, legs.size() - 1);
}

// Largest eigenpair of a symmetric matrix by power iteration.
std::pair<double, Eigen::VectorXd> power_iteration(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows()).normalized();
  for (int it = 0; it < 5000; ++it) v = (m * v).normalized();
  return {v.dot(m * v), v};
}

} // namespace

TEST(Metaorders, RunsOfFiveWithinSixtySeconds) {
  std::vector<Leg> legs;
  std::vector<ArbitrageAction> acts;
  for (int k = 0; k < 5; ++k) acts.push_back(add_action(legs, 1, k * 60, Currency::USD, Currency::EUR));
  for (int k = 0; k < 5; ++k) acts.push_back(add_action(legs, 1, 1000 + k * 61, Currency::USD, Currency::EUR));
  for (int k = 0; k < 4; ++k) acts.push_back(add_action(legs, 2, k, Currency::USD, Currency::EUR));
  // Same dyad, opposite direction: a separate run.
  for (int k = 0; k < 3; ++k) acts.push_back(add_action(legs, 2, 2 + k, Currency::EUR, Currency::USD));
  std::vector<std::optional<double>> usd(acts.size(), 100.0);
  auto m = detect_metaorders(legs, acts, usd);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].user, 1);
  EXPECT_EQ(m[0].actions.size(), 5u);
  EXPECT_DOUBLE_EQ(m[0].mean_delay, 60.0);
  EXPECT_DOUBLE_EQ(m[0].total_bitcoins, 5.0);
  ASSERT_TRUE(m[0].total_usd);
  EXPECT_DOUBLE_EQ(*m[0].total_usd, 500.0);
  EXPECT_EQ(m[0].buy_currency, Currency::USD);

  MetaorderOptions loose{5, 61};
  auto both = detect_metaorders(legs, acts, {}, loose);
  ASSERT_EQ(both.size(), 2u);
  EXPECT_DOUBLE_EQ(both[1].mean_delay, 61.0);
  EXPECT_FALSE(both[1].total_usd);
}

TEST(MetaordersProperty, RunsAreMaximalAndDisjoint) {
  Rng rng(12);
  for (int inst = 0; inst < 60; ++inst) {
    std::vector<Leg> legs;
    std::vector<ArbitrageAction> acts;
    std::int64_t t = 0;
    for (int k = 0; k < 200; ++k) {
      t += rng.between(0, 90);
      Currency a = rng.chance(0.5) ? Currency::USD : Currency::GBP;
      Currency b = a == Currency::USD ? Currency::EUR : Currency::USD;
      acts.push_back(add_action(legs, static_cast<UserId>(1 + rng.below(2)), t, a, b));
    }
    MetaorderOptions opt{static_cast<std::size_t>(rng.between(2, 6)), rng.between(10, 70)};
    auto ms = detect_metaorders(legs, acts, {}, opt);
    std::set<std::size_t> seen;
    for (const auto& m : ms) {
      ASSERT_GE(m.actions.size(), opt.min_length);
      for (std::size_t k = 0; k < m.actions.size(); ++k) {
        const auto& a = acts[m.actions[k]];
        ASSERT_TRUE(seen.insert(m.actions[k]).second);
        ASSERT_EQ(a.user, m.user);
        ASSERT_EQ(legs[a.buy].currency, m.buy_currency);
        ASSERT_EQ(legs[a.sell].currency, m.sell_currency);
        if (k) ASSERT_LE((a.execution_time - acts[m.actions[k - 1]].execution_time).count(), opt.max_gap);
      }
      // No same-direction action of the user lies within max_gap outside the run.
      auto first = acts[m.actions.front()].execution_time;
      auto last = acts[m.actions.back()].execution_time;
      for (std::size_t i = 0; i < acts.size(); ++i) {
        const auto& a = acts[i];
        if (a.user != m.user || legs[a.buy].currency != m.buy_currency || legs[a.sell].currency != m.sell_currency)
          continue;
        if (std::find(m.actions.begin(), m.actions.end(), i) != m.actions.end()) continue;
        bool near = (a.execution_time <= first && (first - a.execution_time).count() <= opt.max_gap) ||
                    (a.execution_time >= last && (a.execution_time - last).count() <= opt.max_gap) ||
                    (a.execution_time > first && a.execution_time < last);
        ASSERT_FALSE(near);
      }
    }
  }
}

TEST(Aggressive, EitherLegInitiating) {
  std::vector<Leg> legs;
  std::vector<ArbitrageAction> acts;
  for (int k = 0; k < 4; ++k) acts.push_back(add_action(legs, 1, k * 600, Currency::USD, Currency::EUR));
  legs[0].aggressive = false;
  legs[1].aggressive = true;
  legs[2].aggressive = false;
  legs[5].aggressive = false;
  auto s = classify_aggressive(legs, acts);
  ASSERT_EQ(s.per_action.size(), 4u);
  EXPECT_EQ(s.per_action[0], true);
  EXPECT_EQ(s.per_action[1], false);
  EXPECT_EQ(s.per_action[2], false);
  EXPECT_FALSE(s.per_action[3]);
  EXPECT_EQ(s.aggressive, 1u);
  EXPECT_EQ(s.unannotated, 1u);
}

TEST(Profiles, CountsMarketsAndLearningDelay) {
  std::vector<Leg> legs;
  std::vector<ArbitrageAction> acts;
  acts.push_back(add_action(legs, 1, 0, Currency::USD, Currency::EUR));
  acts.push_back(add_action(legs, 1, 3 * 86400 + 5, Currency::EUR, Currency::USD));
  acts.push_back(add_action(legs, 1, 20 * 86400, Currency::USD, Currency::GBP));
  acts.push_back(add_action(legs, 2, 0, Currency::USD, Currency::EUR));
  acts.push_back(add_action(legs, 2, 86400, Currency::GBP, Currency::USD));
  acts.push_back(add_action(legs, 3, 100, Currency::USD, Currency::EUR));
  auto aggr = classify_aggressive(legs, acts);
  std::vector<Metaorder> meta(1);
  meta[0].user = 2;
  auto p = build_profiles(legs, acts, meta, aggr);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0].n_actions, 3u);
  EXPECT_EQ(p[0].n_markets, 2u);
  EXPECT_EQ(p[0].n_currencies, 3u);
  EXPECT_EQ(p[0].d_currencies, 1.0);
  EXPECT_DOUBLE_EQ(p[0].log_actions, std::log(3.0));
  EXPECT_EQ(p[0].days_to_new_market, 20);
  EXPECT_EQ(p[1].days_to_new_market, 1);
  EXPECT_EQ(p[1].d_metaorder, 1.0);
  EXPECT_EQ(p[2].n_markets, 1u);
  EXPECT_EQ(p[2].d_currencies, 0.0);
  EXPECT_DOUBLE_EQ(p[2].log_currencies, std::log(2.0));
  EXPECT_FALSE(p[2].days_to_new_market);

  auto kept = learning_filter(p, acts, 14);
  EXPECT_EQ(kept.size(), 3u);
  for (const auto& a : kept) EXPECT_NE(a.user, 1);
  EXPECT_EQ(learning_filter(p, acts, 20).size(), acts.size());
}

TEST(Pca, RankOneDataIsFullyExplained) {
  Rng rng(4);
  Eigen::MatrixXd data(300, 4);
  const double w[4] = {2.0, -1.0, 0.5, 3.0};
  for (Eigen::Index i = 0; i < 300; ++i) {
    double f = rng.normal();
    for (int j = 0; j < 4; ++j) data(i, j) = 10.0 * j + w[j] * f;
  }
  auto r = principal_component(data, 1);
  EXPECT_NEAR(r.explained, 1.0, 1e-10);
  EXPECT_NEAR(r.loading.norm(), 1.0, 1e-12);
  EXPECT_GT(r.loading(1), 0.0);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(std::fabs(r.loading(j)), 0.5, 1e-10);
  EXPECT_LT(r.loading(0), 0.0);
  EXPECT_NEAR(r.scores.mean(), 0.0, 1e-10);
}

TEST(Pca, MatchesPowerIterationOnCorrelationMatrix) {
  Rng rng(9);
  Eigen::MatrixXd data(500, 4);
  for (Eigen::Index i = 0; i < 500; ++i) {
    double f = rng.normal();
    for (int j = 0; j < 4; ++j) data(i, j) = (j + 1) * f + 2.0 * rng.normal();
  }
  auto r = principal_component(data, 0);
  // Oracle: correlation via explicit sums.
  Eigen::MatrixXd c(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double ma = data.col(a).mean(), mb = data.col(b).mean(), sab = 0, saa = 0, sbb = 0;
      for (Eigen::Index i = 0; i < 500; ++i) {
        sab += (data(i, a) - ma) * (data(i, b) - mb);
        saa += (data(i, a) - ma) * (data(i, a) - ma);
        sbb += (data(i, b) - mb) * (data(i, b) - mb);
      }
      c(a, b) = sab / std::sqrt(saa * sbb);
    }
  auto [lambda, v] = power_iteration(c);
  if (v(0) < 0) v = -v;
  EXPECT_NEAR(r.eigenvalues(0), lambda, 1e-9);
  EXPECT_NEAR(r.explained, lambda / 4.0, 1e-9);
  EXPECT_LT((r.loading - v).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Pca, SignIsStableUnderRowOrderAndScale) {
  Rng rng(10);
  Eigen::MatrixXd data(100, 3);
  for (Eigen::Index i = 0; i < 100; ++i) {
    double f = rng.normal();
    data.row(i) << f + rng.normal() * 0.3, -f + rng.normal() * 0.3, f;
  }
  auto a = principal_component(data, 0);
  Eigen::MatrixXd rev = data.colwise().reverse();
  auto b = principal_component(rev, 0);
  auto c = principal_component(data * 7.0, 0);
  EXPECT_LT((a.loading - b.loading).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((a.loading - c.loading).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GT(a.loading(0), 0.0);
}

TEST(Pca, ConstantIndicatorIsDegenerate) {
  Eigen::MatrixXd data(10, 2);
  for (int i = 0; i < 10; ++i) data.row(i) << i, 1.0;
  try {
    principal_component(data);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "DegenerateCovariance");
  }
}
