#pragma once

#include "arbminer/ledger.hpp"
#include "arbminer/matcher.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace arbminer {

struct Metaorder {
  UserId user = 0;
  Currency buy_currency = Currency::USD;
  Currency sell_currency = Currency::USD;
  std::vector<std::size_t> actions; // indices into the action sequence, time ordered
  double mean_delay = 0.0;          // seconds between consecutive actions
  double total_bitcoins = 0.0;
  std::optional<double> total_usd;
};

struct MetaorderOptions {
  std::size_t min_length = 5;
  std::int64_t max_gap = 60;
};

// Maximal runs of actions with the same user and ordered currency pair whose
// consecutive gaps do not exceed max_gap. `usd` is optional per-action value.
std::vector<Metaorder> detect_metaorders(std::span<const Leg> legs, std::span<const ArbitrageAction> actions,
                                         std::span<const std::optional<double>> usd = {},
                                         const MetaorderOptions& opt = {});

struct AggressiveSummary {
  std::vector<std::optional<bool>> per_action; // none when neither leg is annotated
  std::size_t aggressive = 0;
  std::size_t unannotated = 0;
};

AggressiveSummary classify_aggressive(std::span<const Leg> legs, std::span<const ArbitrageAction> actions);

struct UserProfile {
  UserId user = 0;
  std::size_t n_actions = 0;
  std::size_t n_markets = 0;    // distinct dyads
  std::size_t n_currencies = 0; // distinct fiat currencies
  double d_currencies = 0.0;    // at least three currencies
  double log_currencies = 0.0;
  double log_actions = 0.0;
  double d_metaorder = 0.0;
  double d_aggressive = 0.0;
  double pc1_score = 0.0;
  std::optional<std::int64_t> days_to_new_market;
};

std::vector<UserProfile> build_profiles(std::span<const Leg> legs, std::span<const ArbitrageAction> actions,
                                        std::span<const Metaorder> metaorders, const AggressiveSummary& aggressive);

struct PcaResult {
  Eigen::VectorXd loading; // unit norm
  Eigen::VectorXd eigenvalues; // descending
  double explained = 0.0; // share of the first component
  Eigen::VectorXd scores;
};

// First principal component of the correlation matrix (population SD);
// the sign makes loading(sign_column) positive. Throws DegenerateCovariance.
PcaResult principal_component(const Eigen::MatrixXd& data, Eigen::Index sign_column = 0);

// Fills pc1_score from D(Currencies), Log(Actions), D(Metaorder), D(Aggressive).
PcaResult pca_scores(std::vector<UserProfile>& profiles);

// Drops actions of multi-market users who took longer than max_days to open a second market.
std::vector<ArbitrageAction> learning_filter(std::span<const UserProfile> profiles,
                                             std::span<const ArbitrageAction> actions, std::int64_t max_days = 14);

} // namespace arbminer
