#pragma once

#include "arbminer/fee_model.hpp"
#include "arbminer/ledger.hpp"
#include "arbminer/regression.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace arbminer {

// std::mt19937_64 with hand-written transforms, so a seed yields the same
// stream on every platform (std distributions are implementation-defined).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform(); // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n); // [0, n)
  std::int64_t between(std::int64_t lo, std::int64_t hi); // [lo, hi]
  double normal(); // Box-Muller
  bool chance(double p) { return uniform() < p; }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct RateSynthConfig {
  std::uint64_t seed = 7;
  std::vector<Currency> currencies = {Currency::USD, Currency::EUR, Currency::GBP};
  Instant start = make_instant(2012, 3, 1);
  Instant end = make_instant(2012, 9, 1);
  double hourly_volatility = 0.001;
  bool direct_crosses = true; // also emit non-USD pairs, consistent with the USD legs
};

// USD value of one unit of the currency at the start of the walk.
double reference_usd_rate(Currency c);

// Log random walk per currency against USD, hourly-complete over [start - 1h, end).
std::vector<RateBar> gen_rates(const RateSynthConfig& cfg);

struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t n_noise_trades = 10000;
  std::size_t n_planted_actions = 200;
  std::size_t n_noise_users_per_currency = 200;
  std::size_t n_arbitrageurs = 25; // arbitrageur k receives a share of actions proportional to k + 1
  std::int64_t planted_max_dt = 120;
  double planted_max_dq = 5.0;
  std::int64_t separation = 3600;
  // Planted actions draw their time slots from this many shared slots (0: any
  // slot), so several arbitrageurs act within the same hours.
  std::size_t planted_slot_pool = 0;
  std::size_t metaorder_bursts = 0; // runs of five planted actions, 30s apart
  double whale_share = 0.1; // trades whose buyer is the currency's high-volume user
  double duplicate_rate = 0.02;
  double multi_currency_share = 0.02;
  double tibanne_copy_error_share = 0.5;
  double market_order_share = 0.3;
  double fee_noise = 0.02;
  double zero_fee_share = 0.05;
  double planted_spread_sd = 0.5; // percent, per leg
  // Odd-numbered arbitrageurs keep to one dyad; the others use every currency
  // and earn this extra spread (percent), the planted D(Currencies) effect.
  double skill_premium = 1.0;
  std::vector<Currency> currencies = {Currency::USD, Currency::EUR, Currency::GBP};
  Instant start = make_instant(2011, 4, 1);
  Instant end = make_instant(2012, 9, 1);
  double hourly_volatility = 0.001;
};

struct PlantedAction {
  UserId user = 0;
  std::string buy_trade_id;
  std::string sell_trade_id;
};

struct GroundTruth {
  std::vector<PlantedAction> planted;
  std::vector<std::size_t> duplicate_rows; // positions in the emitted ledger
  std::vector<std::string> fee_names;
  std::vector<double> fee_coefficients;
  std::vector<std::string> regression_names;
  std::vector<double> regression_coefficients;
  std::vector<std::string> tibanne_copy_errors; // trade ids
};

struct SynthLedger {
  std::vector<Leg> legs; // with injected duplicates
  std::vector<Leg> base_legs; // before injection
  std::vector<PublicTradeRecord> public_records;
  std::vector<RateBar> rates;
  GroundTruth truth;
};

// Throws InfeasibleConfig.
SynthLedger gen_ledger(const SynthConfig& cfg);

// Spec-5 fee coefficients used to price synthetic fees.
std::vector<double> reference_fee_coefficients();

struct FeeSynthConfig {
  std::uint64_t seed = 11;
  std::size_t n = 20000;
  double noise_sd = 1e-4;
  std::vector<double> beta = reference_fee_coefficients();
};

std::vector<FeeObservation> gen_fee_data(const FeeSynthConfig& cfg);

struct LogitSynthConfig {
  std::uint64_t seed = 13;
  std::size_t n = 50000;
  std::vector<double> beta = {0.4, -0.8, 0.5, 1.2};
};

struct LogitSample {
  Eigen::MatrixXd X; // first column is the intercept
  Eigen::VectorXd y;
};

LogitSample gen_logit_data(const LogitSynthConfig& cfg);

struct RegressionSynthConfig {
  std::uint64_t seed = 17;
  bool interaction = false;
  std::size_t n_rows = 4000;
  std::size_t n_users = 400;
  std::size_t n_dyads = 6;
  std::size_t n_hours = 300;
  double beta_const = 0.5;
  double beta_proxy = 1.3; // level-model ability coefficient
  double beta_inter = 0.5; // dR x proxy coefficient
  double beta_dr = -2.0;
  double beta_usd = 0.2;
  double fe_sd = 0.5;
  double cluster_sd = 0.5;
  double noise_sd = 1.0;
};

struct RegressionSynth {
  std::vector<RegressionRow> rows;
  GroundTruth truth;
};

// Level rows: spread = b0 + b1 proxy + b2 usd + dyad + hour + user shock + noise.
// Interaction rows: spread = bi dR*proxy + bd dR + b2 usd + user + dyad + hour + user-slope*dR + noise.
RegressionSynth gen_regression_data(const RegressionSynthConfig& cfg);

} // namespace arbminer
