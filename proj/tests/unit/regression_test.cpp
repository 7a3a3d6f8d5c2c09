#include "arbminer/error.hpp"
#include "arbminer/regression.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace arbtest;

namespace {

PricedAction priced(UserId user, std::int64_t hour, double spread, std::optional<double> usd,
                    std::optional<double> dr = std::nullopt) {
  PricedAction p;
  p.action.user = user;
  p.action.dyad = Dyad::of(Currency::USD, Currency::EUR);
  p.action.execution_hour = Instant{std::chrono::hours{hour}};
  p.off_er = 1.0;
  p.spread = {spread + 1, spread, std::nullopt};
  p.usd = usd;
  p.delta_r = dr;
  return p;
}

UserProfile profile(UserId user, double dc) {
  UserProfile p;
  p.user = user;
  p.d_currencies = dc;
  p.log_actions = 2.0;
  return p;
}

} // namespace

TEST(RegressionRows, FiltersAndScales) {
  std::vector<PricedAction> pa = {priced(1, 10, 0.5, 20000.0), priced(1, 11, 0.7, std::nullopt),
                                  priced(2, 12, 0.1, 5000.0), priced(9, 12, 0.1, 5000.0)};
  pa[2].excluded_missing_rate = true;
  std::vector<UserProfile> prof = {profile(1, 1.0), profile(2, 0.0)};
  RegressionSpec spec;
  auto rows = regression_rows(pa, prof, spec);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].usd, 2.0);
  EXPECT_DOUBLE_EQ(rows[0].spread, 0.5);
  EXPECT_DOUBLE_EQ(rows[0].proxy, 1.0);
  EXPECT_EQ(rows[0].hour, 10);
  spec.outcome = FeeRegime::None;
  EXPECT_DOUBLE_EQ(regression_rows(pa, prof, spec)[0].spread, 1.5);
  spec.outcome = FeeRegime::Expected;
  EXPECT_TRUE(regression_rows(pa, prof, spec).empty());
  spec.outcome = FeeRegime::Actual;
  spec.proxy = AbilityProxy::LogActions;
  EXPECT_DOUBLE_EQ(regression_rows(pa, prof, spec)[0].proxy, 2.0);
}

TEST(Regression, ProxyNamesRoundTrip) {
  for (auto p : all_proxies()) EXPECT_EQ(parse_proxy(to_string(p)), p);
  EXPECT_EQ(parse_proxy("PC1"), AbilityProxy::PC1);
  EXPECT_FALSE(parse_proxy("skill"));
  EXPECT_EQ(proxy_label(AbilityProxy::DCurrencies), "D(Currencies)");
}

TEST(Regression, LevelEquationRejectsUserEffects) {
  RegressionSynthConfig cfg;
  auto d = gen_regression_data(cfg);
  RegressionSpec spec;
  spec.fe_user = true;
  EXPECT_THROW(run_eq1(d.rows, spec), Error);
}

TEST(Regression, LevelModelMatchesDummyOracle) {
  RegressionSynthConfig cfg;
  cfg.n_rows = 600;
  cfg.n_users = 60;
  cfg.n_hours = 40;
  auto d = gen_regression_data(cfg);
  RegressionSpec spec;
  spec.fe_hour = spec.fe_dyad = true;
  auto r = run_eq1(d.rows, spec);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(d.rows.size()), 2);
  Eigen::VectorXd y(X.rows());
  std::vector<std::vector<std::int64_t>> fe(2);
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    X(static_cast<Eigen::Index>(i), 0) = d.rows[i].proxy;
    X(static_cast<Eigen::Index>(i), 1) = d.rows[i].usd;
    y(static_cast<Eigen::Index>(i)) = d.rows[i].spread;
    fe[0].push_back(d.rows[i].hour);
    fe[1].push_back(d.rows[i].dyad);
  }
  auto want = dummy_ols_slopes(y, X, fe);
  EXPECT_LE(rel_diff(r.coef_of("D(Currencies)"), want(0)), 1e-8);
  EXPECT_LE(rel_diff(r.coef_of(kUsdLabel), want(1)), 1e-8);
  EXPECT_EQ(r.fe_names, (std::vector<std::string>{"Time", "Dyad"}));
}

TEST(Regression, LevelModelRecoversPlantedEffect) {
  RegressionSynthConfig cfg;
  auto d = gen_regression_data(cfg);
  RegressionSpec spec;
  spec.fe_hour = spec.fe_dyad = true;
  auto r = run_eq1(d.rows, spec);
  EXPECT_LT(std::fabs(r.coef_of("D(Currencies)") - cfg.beta_proxy), 3 * r.se_of("D(Currencies)"));
  EXPECT_LT(std::fabs(r.coef_of(kUsdLabel) - cfg.beta_usd), 3 * r.se_of(kUsdLabel));
  EXPECT_EQ(r.n_clusters, cfg.n_users);
}

TEST(Regression, InteractionLayoutAndRecovery) {
  RegressionSynthConfig cfg;
  cfg.interaction = true;
  auto d = gen_regression_data(cfg);
  d.rows[0].delta_r.reset();
  RegressionSpec spec;
  spec.interaction = true;
  spec.fe_user = spec.fe_hour = spec.fe_dyad = true;
  auto r = run_eq2(d.rows, spec);
  EXPECT_EQ(r.n_input, d.rows.size() - 1);
  EXPECT_EQ(r.names[1], "dR x D(Currencies)");
  EXPECT_EQ(r.names[2], "dR");
  EXPECT_EQ(r.names[3], kUsdLabel);
  EXPECT_LT(std::fabs(r.coef(1) - cfg.beta_inter), 3 * r.se(1));
  EXPECT_LT(std::fabs(r.coef(2) - cfg.beta_dr), 3 * r.se(2));

  spec.fe_user = spec.fe_hour = spec.fe_dyad = false;
  spec.proxy_main_effect = true;
  auto m = run_eq2(d.rows, spec);
  EXPECT_TRUE(m.index_of("D(Currencies)").has_value());
  EXPECT_EQ(m.names.size(), 5u);
}

TEST(Regression, CoverageOverReplications) {
  int covered1 = 0, covered2 = 0;
  const int reps = 40;
  for (int k = 0; k < reps; ++k) {
    RegressionSynthConfig cfg;
    cfg.seed = 5000 + static_cast<std::uint64_t>(k);
    cfg.n_rows = 1500;
    cfg.n_users = 150;
    auto d1 = gen_regression_data(cfg);
    RegressionSpec s1;
    s1.fe_hour = s1.fe_dyad = true;
    auto r1 = run_eq1(d1.rows, s1);
    covered1 += std::fabs(r1.coef(1) - cfg.beta_proxy) <= 2 * r1.se(1);
    cfg.interaction = true;
    auto d2 = gen_regression_data(cfg);
    RegressionSpec s2;
    s2.interaction = true;
    s2.fe_user = s2.fe_hour = s2.fe_dyad = true;
    auto r2 = run_eq2(d2.rows, s2);
    covered2 += std::fabs(r2.coef(1) - cfg.beta_inter) <= 2 * r2.se(1);
  }
  // Loose bound for a short run; the full check lives in the acceptance suite.
  EXPECT_GE(covered1, 32);
  EXPECT_GE(covered2, 32);
}

TEST(RegressionTable, LayoutHasStarsSeAndFlags) {
  RegressionSynthConfig cfg;
  auto d = gen_regression_data(cfg);
  RegressionSpec spec;
  std::vector<TableColumn> cols;
  cols.push_back({"(1)", run_eq1(d.rows, spec), false, false, false});
  spec.fe_hour = true;
  cols.push_back({"(2)", run_eq1(d.rows, spec), false, true, false});
  std::ostringstream out;
  write_regression_table(out, cols);
  std::istringstream in(out.str());
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 1u + 2 * 3 + 3 + 3);
  EXPECT_EQ(lines[0], "variable,(1),(2)");
  EXPECT_EQ(lines[1].rfind("D(Currencies),", 0), 0u);
  EXPECT_NE(lines[1].find("***"), std::string::npos);
  EXPECT_EQ(lines[2].rfind(",(", 0), 0u);
  EXPECT_EQ(lines[5].rfind("Constant,", 0), 0u);
  EXPECT_EQ(lines[8], "Time FE,N,Y");
  EXPECT_EQ(lines[10], "N,4000,4000");
}
