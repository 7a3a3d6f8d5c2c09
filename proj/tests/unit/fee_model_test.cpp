#include "arbminer/error.hpp"
#include "arbminer/fee_model.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace arbtest;

namespace {

Eigen::MatrixXd design_of(const std::vector<FeeObservation>& obs, Eigen::VectorXd& y) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(obs.size()), 9);
  y.resize(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    auto row = fee_design_row(obs[static_cast<std::size_t>(i)].features, 5);
    for (Eigen::Index j = 0; j < 9; ++j) X(i, j) = row[static_cast<std::size_t>(j)];
    y(i) = obs[static_cast<std::size_t>(i)].fee_pct;
  }
  return X;
}

} // namespace

TEST(FeeModel, ActualFeeCombinesBothCurrencies) {
  auto l = leg("1", "2012-05-01 10:00:00", 1, Side::Buy, Currency::USD, "2", "10");
  l.bitcoin_fee = dec("0.01");
  l.money_fee = dec("0.02");
  EXPECT_NEAR(actual_fee_pct(l), 0.7, 1e-12);
  l.money = dec("0");
  EXPECT_THROW(actual_fee_pct(l), Error);
}

TEST(FeeModel, RollingWindowIsOpenAtBothEnds) {
  std::vector<Leg> legs = {leg("1", "2012-05-01 00:00:00", 1, Side::Buy, Currency::USD, "1", "1"),
                           leg("2", "2012-05-01 00:00:01", 1, Side::Buy, Currency::USD, "2", "1"),
                           leg("3", "2012-05-31 00:00:00", 1, Side::Buy, Currency::USD, "4", "1"),
                           leg("4", "2012-05-31 00:00:00", 1, Side::Buy, Currency::USD, "8", "1"),
                           leg("5", "2012-05-31 00:00:00", 2, Side::Buy, Currency::USD, "16", "1")};
  auto v = rolling_volume_720h(legs);
  EXPECT_DOUBLE_EQ(v[0], 0.0);
  EXPECT_DOUBLE_EQ(v[1], 1.0);
  // Exactly 720h after the first leg: that leg has left the window and the
  // same-second leg is not yet in it.
  EXPECT_DOUBLE_EQ(v[2], 2.0);
  EXPECT_DOUBLE_EQ(v[3], 2.0);
  EXPECT_DOUBLE_EQ(v[4], 0.0);
}

TEST(FeeModelProperty, RollingVolumeMatchesBruteForce) {
  SynthConfig cfg;
  cfg.n_noise_trades = 1500;
  cfg.n_planted_actions = 60;
  cfg.n_noise_users_per_currency = 10;
  cfg.start = make_instant(2012, 1, 1);
  cfg.end = make_instant(2012, 4, 1);
  auto s = gen_ledger(cfg);
  auto fast = rolling_volume_720h(s.base_legs);
  auto slow = brute_rolling_volume(s.base_legs);
  ASSERT_EQ(fast.size(), slow.size());
  for (std::size_t i = 0; i < fast.size(); ++i) ASSERT_LE(rel_diff(fast[i], slow[i]), 1e-12) << i;
}

TEST(FeeModel, FeaturesAndPeriods) {
  auto f = FeeFeatures::make(0.5, make_day(2011, 6, 23));
  EXPECT_EQ(f.log_vol, 0.0);
  EXPECT_EQ(f.t0, 1.0);
  EXPECT_EQ(FeeFeatures::make(100, make_day(2011, 6, 24)).vol_small, 1.0);
  EXPECT_EQ(FeeFeatures::make(100, make_day(2011, 6, 24)).t1, 1.0);
  EXPECT_EQ(FeeFeatures::make(9999.99, make_day(2012, 1, 1)).vol_big, 0.0);
  EXPECT_EQ(FeeFeatures::make(10000, make_day(2012, 1, 1)).vol_big, 1.0);
  EXPECT_EQ(FeeFeatures::make(10000, make_day(2012, 1, 1)).vol_small, 0.0);
  EXPECT_EQ(FeeFeatures::make(10000, make_day(2012, 1, 1)).t_holid, 1.0);
  EXPECT_EQ(FeeFeatures::make(10000, make_day(2012, 1, 2)).t_holid, 0.0);
  EXPECT_TRUE(in_holidays(make_day(2012, 11, 10)));
  EXPECT_FALSE(in_t1(make_day(2011, 8, 19)));
}

TEST(FeeModel, DesignLayouts) {
  for (int spec = 1; spec <= 5; ++spec) {
    auto f = FeeFeatures::make(500, make_day(2011, 5, 1));
    EXPECT_EQ(fee_design_names(spec).size(), fee_design_row(f, spec).size());
  }
  auto names = fee_design_names(5);
  EXPECT_EQ(names[4], "LogVol*VolSmall");
  EXPECT_EQ(fee_design_names(1, VolumeScale::Linear)[1], "LinVol");
  EXPECT_THROW(fee_design_names(6), Error);
}

TEST(FeeModel, ExactDataRecoversCoefficients) {
  FeeSynthConfig cfg;
  cfg.n = 3000;
  cfg.noise_sd = 0.0;
  auto obs = gen_fee_data(cfg);
  auto m = fit_fee_ols(obs);
  ASSERT_EQ(m.coefficients.size(), 9u);
  for (std::size_t j = 0; j < 9; ++j) EXPECT_NEAR(m.coefficients[j], cfg.beta[j], 1e-9) << m.names[j];
  EXPECT_NEAR(m.fit, 1.0, 1e-12);
}

TEST(FeeModel, OlsMatchesNormalEquations) {
  FeeSynthConfig cfg;
  cfg.n = 4000;
  cfg.noise_sd = 0.05;
  auto obs = gen_fee_data(cfg);
  auto m = fit_fee_ols(obs);
  Eigen::VectorXd y;
  Eigen::MatrixXd X = design_of(obs, y);
  Eigen::MatrixXd xtx = X.transpose() * X;
  Eigen::VectorXd b = xtx.ldlt().solve(X.transpose() * y);
  Eigen::VectorXd e = y - X * b;
  double s2 = e.squaredNorm() / static_cast<double>(X.rows() - X.cols());
  Eigen::MatrixXd cov = s2 * xtx.inverse();
  for (Eigen::Index j = 0; j < 9; ++j) {
    EXPECT_LE(rel_diff(m.coefficients[static_cast<std::size_t>(j)], b(j)), 1e-8);
    EXPECT_LE(rel_diff(m.std_errors[static_cast<std::size_t>(j)], std::sqrt(cov(j, j))), 1e-8);
  }
}

TEST(FeeModel, RankDeficientDesignIsReported) {
  std::vector<FeeObservation> obs;
  for (int i = 0; i < 50; ++i) obs.push_back({FeeFeatures::make(10.0 + i, make_day(2012, 5, 1)), 0.5});
  try {
    fit_fee_ols(obs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "RankDeficientDesign");
    EXPECT_EQ(e.kind(), ErrorKind::Numerical);
  }
  EXPECT_NO_THROW(fit_fee_ols(obs, 1));
}

TEST(FeeModel, PredictionIsClampedAndTextRoundTrips) {
  FittedModel m;
  m.kind = "fee_ols";
  m.spec = 1;
  m.names = fee_design_names(1);
  m.coefficients = {0.2, -0.1};
  m.std_errors = {0.01, 0.02};
  EXPECT_DOUBLE_EQ(predict_expected_fee(FeeFeatures::make(1, make_day(2012, 5, 1)), m), 0.2);
  EXPECT_DOUBLE_EQ(predict_expected_fee(FeeFeatures::make(1e6, make_day(2012, 5, 1)), m), 0.0);
  auto back = FittedModel::from_text(m.to_text());
  EXPECT_EQ(back.names, m.names);
  EXPECT_EQ(back.coefficients, m.coefficients);
  EXPECT_EQ(back.std_errors, m.std_errors);
  EXPECT_EQ(back.coef("LogVol"), -0.1);
  EXPECT_THROW(back.coef("T0"), Error);
}

TEST(Logit, GradientMatchesFiniteDifferences) {
  LogitSynthConfig cfg;
  cfg.n = 2000;
  auto d = gen_logit_data(cfg);
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd beta(4);
    for (int j = 0; j < 4; ++j) beta(j) = rng.uniform(-1.5, 1.5);
    Eigen::VectorXd g = logit_gradient(d.X, d.y, beta);
    for (int j = 0; j < 4; ++j) {
      const double h = 1e-5;
      Eigen::VectorXd up = beta, dn = beta;
      up(j) += h;
      dn(j) -= h;
      double fd = (logit_log_likelihood(d.X, d.y, up) - logit_log_likelihood(d.X, d.y, dn)) / (2 * h);
      EXPECT_LE(std::fabs(fd - g(j)) / std::max(1.0, std::fabs(g(j))), 1e-6);
    }
  }
}

TEST(Logit, LikelihoodIsStableForLargeIndices) {
  Eigen::MatrixXd X(2, 1);
  X << 800, -800;
  Eigen::VectorXd y(2);
  y << 1, 0;
  Eigen::VectorXd b(1);
  b << 1.0;
  EXPECT_NEAR(logit_log_likelihood(X, y, b), 0.0, 1e-12);
  EXPECT_TRUE(std::isfinite(logit_gradient(X, y, b)(0)));
}

TEST(Logit, RecoversPlantedCoefficients) {
  LogitSynthConfig cfg;
  cfg.n = 20000;
  auto d = gen_logit_data(cfg);
  auto m = fit_logit(d.X, d.y, {"c", "x1", "x2", "x3"});
  for (std::size_t j = 0; j < 4; ++j) EXPECT_LE(std::fabs(m.coefficients[j] - cfg.beta[j]), 3 * m.std_errors[j]);
  Eigen::Map<const Eigen::VectorXd> beta(m.coefficients.data(), 4);
  EXPECT_LT(logit_gradient(d.X, d.y, beta).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_GT(m.fit, 0.0);
}

TEST(Logit, SeparationIsDetected) {
  Eigen::MatrixXd X(40, 2);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) {
    X(i, 0) = 1;
    X(i, 1) = (i - 19.5) * 0.1;
    y(i) = i >= 20 ? 1 : 0;
  }
  try {
    fit_logit(X, y, {"c", "x"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "Separation");
  }
}

TEST(ZeroFee, ObservationFlags) {
  auto b = leg("1", "2011-12-20 10:00:00", 20000, Side::Buy, Currency::USD, "2", "10");
  auto s = leg("1", "2011-12-20 10:00:00", 634, Side::Sell, Currency::USD, "2", "10");
  s.money_fee = dec("0.05");
  auto cfg = ZeroFeeConfig::defaults();
  cfg.anomalous_users = {634};
  auto obs = zero_fee_observations(std::vector<Leg>{b, s}, cfg);
  ASSERT_EQ(obs.size(), 2u);
  EXPECT_EQ(obs[0].pays_fee, 0);
  EXPECT_EQ(obs[1].pays_fee, 1);
  EXPECT_EQ(obs[0].matchers, 1.0);
  EXPECT_EQ(obs[1].matchers, 0.0);
  EXPECT_EQ(obs[0].early_adopters, 0.0);
  EXPECT_EQ(obs[1].early_adopters, 1.0);
  EXPECT_EQ(obs[1].markus, 1.0);
  EXPECT_EQ(obs[0].anomalous_days, 1.0);
  EXPECT_DOUBLE_EQ(obs[0].date, static_cast<double>((make_day(2011, 12, 20) - make_day(2011, 4, 1)).count()));
  EXPECT_EQ(zero_fee_design_names(5).size(), zero_fee_design_row(obs[0], 5).size());
}
