#pragma once

#include "arbminer/ledger.hpp"

#include <Eigen/Dense>

#include <set>
#include <span>
#include <string>
#include <vector>

namespace arbminer {

// (BitcoinFee/Bitcoins + MoneyFee/Money) * 100. Throws DegenerateLeg on zero amounts.
double actual_fee_pct(const Leg& leg);

inline constexpr std::int64_t kFeeWindowSeconds = 720 * 3600;

// Bitcoin volume a user traded in the open window (t - 720h, t).
double rolling_volume_at(std::span<const Instant> times, std::span<const double> volumes, Instant t);
// Same quantity for every leg, computed per user with a sliding window.
std::vector<double> rolling_volume_720h(std::span<const Leg> legs);

struct FeeFeatures {
  double volume = 0.0;
  double log_vol = 0.0; // ln(max(volume, 1))
  double vol_small = 0.0; // 100 <= volume < 10,000
  double vol_big = 0.0;   // volume >= 10,000
  double t0 = 0.0;
  double t1 = 0.0;
  double t_holid = 0.0;

  static FeeFeatures make(double volume, Day day);
};

bool in_t0(Day d);
bool in_t1(Day d);
bool in_holidays(Day d);

enum class VolumeScale { Log, Linear };

struct FittedModel {
  std::string kind; // "fee_ols" or "zero_fee_logit"
  int spec = 5;
  VolumeScale scale = VolumeScale::Log;
  std::vector<std::string> names;
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  double fit = 0.0; // R^2 or pseudo-R^2
  double log_likelihood = 0.0;
  std::size_t n_obs = 0;
  int iterations = 0;

  double coef(std::string_view name) const;
  std::string to_text() const;
  static FittedModel from_text(const std::string& text);
};

std::vector<std::string> fee_design_names(int spec, VolumeScale scale = VolumeScale::Log);
std::vector<double> fee_design_row(const FeeFeatures& f, int spec, VolumeScale scale = VolumeScale::Log);

struct FeeObservation {
  FeeFeatures features;
  double fee_pct = 0.0;
};

// Legs with 0 < fee < 1 percent, with their rolling volumes.
std::vector<FeeObservation> fee_observations(std::span<const Leg> legs);

// Throws RankDeficientDesign.
FittedModel fit_fee_ols(std::span<const FeeObservation> obs, int spec = 5, VolumeScale scale = VolumeScale::Log);
// Linear prediction clamped at zero.
double predict_expected_fee(const FeeFeatures& f, const FittedModel& model);
// Annotates expected_fee_pct on every leg.
void annotate_expected_fees(std::vector<Leg>& legs, const FittedModel& model);

// Logistic regression fitted by iteratively reweighted least squares.
struct LogitOptions {
  int max_iterations = 100;
  double tolerance = 1e-10;
  double separation_bound = 50.0;
};

double logit_log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);
Eigen::VectorXd logit_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);
// Throws Separation / NonConvergence / RankDeficientDesign.
FittedModel fit_logit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<std::string> names,
                      const LogitOptions& opt = {});

struct ZeroFeeConfig {
  std::set<Day> anomalous_days;
  std::set<UserId> anomalous_users;
  std::set<UserId> markus_ids;
  std::set<UserId> willy_ids;
  UserId early_adopter_max_id = 16000;
  Day date_origin = make_day(2011, 4, 1);

  static ZeroFeeConfig defaults();
};

struct ZeroFeeObservation {
  double log_vol = 0.0;
  double bitcoins = 0.0;
  double date = 0.0; // days since the origin
  double anomalous_days = 0.0;
  double early_adopters = 0.0;
  double anomalous_users = 0.0;
  double matchers = 0.0; // counterparty is an anomalous user
  double markus = 0.0;
  double willy = 0.0;
  int pays_fee = 0;
};

std::vector<std::string> zero_fee_design_names(int spec);
std::vector<double> zero_fee_design_row(const ZeroFeeObservation& o, int spec);
std::vector<ZeroFeeObservation> zero_fee_observations(std::span<const Leg> legs, const ZeroFeeConfig& cfg);
// Outcome is 1 when the leg paid a positive fee.
FittedModel fit_zero_fee_logit(std::span<const ZeroFeeObservation> obs, int spec = 5, const LogitOptions& opt = {});

} // namespace arbminer
