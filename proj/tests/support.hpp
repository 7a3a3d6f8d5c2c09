#pragma once

#include "arbminer/clean.hpp"
#include "arbminer/econometrics.hpp"
#include "arbminer/ledger.hpp"
#include "arbminer/matcher.hpp"
#include "arbminer/synth.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace arbtest {

using namespace arbminer;

Decimal dec(const std::string& s);

Leg leg(const std::string& trade_id, const std::string& when, UserId user, Side side, Currency currency,
        const std::string& btc, const std::string& money, const std::string& money_jpy = "0");

// The ten same-second rows 930..939 of the deduplication example; source_row
// carries the row label.
std::vector<Leg> dedup_fixture();
std::vector<std::size_t> row_labels(const std::vector<Leg>& legs);

// One user's legs from the matching illustration, 180 s to 1300 s after a
// common origin. At dT = 150 s and dQ = 40 % exactly one action forms.
std::vector<Leg> fig3_fixture();
MatchConfig fig3_config();

// Random ledgers for matcher cross-checks: few users, three currencies,
// crowded times and repeated sizes so that ties and competition are common.
std::vector<Leg> random_match_instance(Rng& rng, std::size_t n_legs);

// Explicit-dummy least squares over the full sample: constant, X, then one
// dummy per non-reference level of every FE dimension. Returns the slope
// coefficients for X.
Eigen::VectorXd dummy_ols_slopes(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                 const std::vector<std::vector<std::int64_t>>& fe);
Eigen::MatrixXd dummy_design(const Eigen::MatrixXd& X, const std::vector<std::vector<std::int64_t>>& fe);

// Textbook cluster sandwich with explicit double sum over same-cluster pairs
// and the CR1 factor.
Eigen::MatrixXd dense_cluster_cov(const Eigen::MatrixXd& X, const Eigen::VectorXd& e,
                                  const std::vector<std::int64_t>& clusters);

// Trailing 720h volume by scanning every leg of the same user.
std::vector<double> brute_rolling_volume(const std::vector<Leg>& legs);

// Key comparison used to test dedup against a pre-injection ledger.
bool same_leg(const Leg& a, const Leg& b);

double rel_diff(double a, double b);

// Random FE regression: 1..3 slopes, the given number of FE dimensions with
// few levels each, 2..16 clusters.
struct FeInstance {
  OlsProblem problem;
  std::vector<std::vector<std::int64_t>> fe;
};
FeInstance random_fe_instance(Rng& rng, std::size_t n, std::size_t n_fe);

} // namespace arbtest
