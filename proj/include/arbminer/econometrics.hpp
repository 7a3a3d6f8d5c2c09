#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace arbminer {

struct FeDimension {
  std::string name;
  std::vector<std::int64_t> ids; // one group id per observation
};

struct OlsProblem {
  Eigen::VectorXd y;
  Eigen::MatrixXd X; // slope regressors only; a constant is always added
  std::vector<std::string> names;
  std::vector<FeDimension> fixed_effects;
  std::vector<std::int64_t> clusters;
};

struct DemeanOptions {
  double tolerance = 1e-10;
  int max_sweeps = 10000;
};

struct RegressionResult {
  std::vector<std::string> names; // "Constant" first
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  Eigen::VectorXd pvalue;
  Eigen::MatrixXd cov;
  double r2 = 0.0;
  std::size_t n_input = 0;
  std::size_t n_used = 0;
  std::vector<std::string> fe_names;
  std::vector<std::size_t> dropped_singletons; // per FE dimension
  std::size_t n_clusters = 0;
  int sweeps = 0;
  std::vector<std::size_t> used_rows;
  Eigen::VectorXd residuals;

  std::optional<std::size_t> index_of(std::string_view name) const;
  double coef_of(std::string_view name) const;
  double se_of(std::string_view name) const;
  std::string stars(std::size_t i) const;
};

// Rows kept after iteratively dropping observations alone in any FE group.
std::vector<std::size_t> drop_singletons(const std::vector<FeDimension>& fe, std::vector<std::size_t>& dropped_per_dim);

// Alternating projections; columns of M are demeaned in place within every FE
// dimension. Returns the number of sweeps used.
int demean(Eigen::MatrixXd& M, const std::vector<std::vector<std::int64_t>>& groups, const DemeanOptions& opt = {});

struct ClusterCovariance {
  Eigen::MatrixXd cov;
  Eigen::VectorXd se;
  std::size_t clusters = 0;
  double factor = 0.0;
};

// CR1 sandwich: c = G/(G-1) * (N-1)/(N-K) with K = X.cols() + absorbed_k.
// Throws SingleCluster.
ClusterCovariance cluster_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& resid,
                             std::span<const std::int64_t> clusters, Eigen::Index absorbed_k = 0);

// Parameters absorbed by the fixed effects that count toward K: levels - 1
// per dimension, skipping dimensions nested within the clusters.
Eigen::Index absorbed_parameters(const std::vector<std::vector<std::int64_t>>& groups,
                                 std::span<const std::int64_t> clusters);

// Throws RankDeficient, EmptyAfterSingletonDrop, SingleCluster.
RegressionResult ols_fe(const OlsProblem& problem, const DemeanOptions& opt = {});

} // namespace arbminer
