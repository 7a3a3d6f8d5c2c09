#include "arbminer/econometrics.hpp"

#include "arbminer/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace arbminer {

std::optional<std::size_t> RegressionResult::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  return std::nullopt;
}

double RegressionResult::coef_of(std::string_view name) const {
  auto i = index_of(name);
  if (!i) throw usage_error("UnknownCoefficient", std::string(name));
  return coef(static_cast<Eigen::Index>(*i));
}

double RegressionResult::se_of(std::string_view name) const {
  auto i = index_of(name);
  if (!i) throw usage_error("UnknownCoefficient", std::string(name));
  return se(static_cast<Eigen::Index>(*i));
}

std::string RegressionResult::stars(std::size_t i) const {
  double p = pvalue(static_cast<Eigen::Index>(i));
  if (std::isnan(p)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

namespace {

std::vector<std::vector<std::int64_t>> dense_ids(const std::vector<std::vector<std::int64_t>>& raw) {
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& ids : raw) {
    std::unordered_map<std::int64_t, std::int64_t> map;
    std::vector<std::int64_t> d(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      auto [it, fresh] = map.try_emplace(ids[i], static_cast<std::int64_t>(map.size()));
      d[i] = it->second;
    }
    out.push_back(std::move(d));
  }
  return out;
}

} // namespace

std::vector<std::size_t> drop_singletons(const std::vector<FeDimension>& fe, std::vector<std::size_t>& dropped) {
  const std::size_t n = fe.empty() ? 0 : fe.front().ids.size();
  std::vector<char> keep(n, 1);
  dropped.assign(fe.size(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t d = 0; d < fe.size(); ++d) {
      std::unordered_map<std::int64_t, std::size_t> count;
      for (std::size_t i = 0; i < n; ++i)
        if (keep[i]) ++count[fe[d].ids[i]];
      for (std::size_t i = 0; i < n; ++i)
        if (keep[i] && count[fe[d].ids[i]] == 1) {
          keep[i] = 0;
          ++dropped[d];
          changed = true;
        }
    }
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) rows.push_back(i);
  return rows;
}

int demean(Eigen::MatrixXd& M, const std::vector<std::vector<std::int64_t>>& raw_groups, const DemeanOptions& opt) {
  if (raw_groups.empty()) return 0;
  auto groups = dense_ids(raw_groups);
  const Eigen::Index n = M.rows(), m = M.cols();
  std::vector<std::vector<double>> counts;
  for (const auto& g : groups) {
    std::int64_t levels = g.empty() ? 0 : *std::max_element(g.begin(), g.end()) + 1;
    std::vector<double> c(static_cast<std::size_t>(levels), 0.0);
    for (auto id : g) c[static_cast<std::size_t>(id)] += 1.0;
    counts.push_back(std::move(c));
  }
  Eigen::VectorXd scale(m);
  for (Eigen::Index j = 0; j < m; ++j) scale(j) = std::max(1.0, M.col(j).cwiseAbs().maxCoeff());

  int sweep = 0;
  for (; sweep < opt.max_sweeps; ++sweep) {
    double worst = 0;
    for (std::size_t d = 0; d < groups.size(); ++d) {
      const auto& g = groups[d];
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(counts[d].size()), m);
      for (Eigen::Index i = 0; i < n; ++i) sums.row(g[static_cast<std::size_t>(i)]) += M.row(i);
      for (Eigen::Index l = 0; l < sums.rows(); ++l) sums.row(l) /= counts[d][static_cast<std::size_t>(l)];
      for (Eigen::Index j = 0; j < m; ++j) worst = std::max(worst, sums.col(j).cwiseAbs().maxCoeff() / scale(j));
      for (Eigen::Index i = 0; i < n; ++i) M.row(i) -= sums.row(g[static_cast<std::size_t>(i)]);
    }
    if (groups.size() == 1 || worst < opt.tolerance) return sweep + 1;
  }
  throw numerical_error("NonConvergence", "fixed-effect demeaning did not converge");
}

ClusterCovariance cluster_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& resid,
                             std::span<const std::int64_t> clusters, Eigen::Index absorbed_k) {
  const Eigen::Index n = X.rows(), k = X.cols();
  const Eigen::Index k_total = k + absorbed_k;
  std::map<std::int64_t, Eigen::VectorXd> score;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [it, fresh] = score.try_emplace(clusters[static_cast<std::size_t>(i)], Eigen::VectorXd::Zero(k));
    it->second += X.row(i).transpose() * resid(i);
  }
  const auto g = static_cast<double>(score.size());
  if (score.size() < 2) throw numerical_error("SingleCluster", "cluster-robust errors need at least two clusters");
  if (n <= k_total) throw numerical_error("RankDeficient", "no residual degrees of freedom");
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (const auto& [id, s] : score) meat += s * s.transpose();
  Eigen::MatrixXd bread = (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  ClusterCovariance c;
  c.clusters = score.size();
  c.factor = g / (g - 1.0) * static_cast<double>(n - 1) / static_cast<double>(n - k_total);
  c.cov = c.factor * bread * meat * bread;
  c.se = c.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return c;
}

Eigen::Index absorbed_parameters(const std::vector<std::vector<std::int64_t>>& groups,
                                 std::span<const std::int64_t> clusters) {
  Eigen::Index k = 0;
  for (const auto& g : groups) {
    std::map<std::int64_t, std::int64_t> cluster_of;
    bool nested = true;
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto [it, fresh] = cluster_of.try_emplace(g[i], clusters[i]);
      if (!fresh && it->second != clusters[i]) nested = false;
    }
    if (!nested) k += static_cast<Eigen::Index>(cluster_of.size()) - 1;
  }
  return k;
}

RegressionResult ols_fe(const OlsProblem& pb, const DemeanOptions& opt) {
  const std::size_t n_in = static_cast<std::size_t>(pb.y.size());
  const Eigen::Index p = pb.X.cols();
  if (pb.X.rows() != pb.y.size() || pb.clusters.size() != n_in) throw usage_error("BadProblem", "row count mismatch");
  for (const auto& f : pb.fixed_effects)
    if (f.ids.size() != n_in) throw usage_error("BadProblem", "fixed-effect length mismatch");

  RegressionResult r;
  r.n_input = n_in;
  for (const auto& f : pb.fixed_effects) r.fe_names.push_back(f.name);
  if (pb.fixed_effects.empty()) {
    for (std::size_t i = 0; i < n_in; ++i) r.used_rows.push_back(i);
  } else {
    r.used_rows = drop_singletons(pb.fixed_effects, r.dropped_singletons);
  }
  const auto n = static_cast<Eigen::Index>(r.used_rows.size());
  r.n_used = r.used_rows.size();
  if (n == 0) throw numerical_error("EmptyAfterSingletonDrop", "no observations left after dropping singletons");
  if (n <= p + 1) throw numerical_error("RankDeficient", "fewer observations than coefficients");

  Eigen::MatrixXd M(n, p + 1);
  std::vector<std::int64_t> cl(r.used_rows.size());
  std::vector<std::vector<std::int64_t>> groups(pb.fixed_effects.size(), std::vector<std::int64_t>(r.used_rows.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t row = r.used_rows[static_cast<std::size_t>(i)];
    M(i, 0) = pb.y(static_cast<Eigen::Index>(row));
    M.row(i).tail(p) = pb.X.row(static_cast<Eigen::Index>(row));
    cl[static_cast<std::size_t>(i)] = pb.clusters[row];
    for (std::size_t d = 0; d < groups.size(); ++d) groups[d][static_cast<std::size_t>(i)] = pb.fixed_effects[d].ids[row];
  }
  Eigen::VectorXd raw_y = M.col(0);
  Eigen::RowVectorXd means = M.colwise().mean();
  Eigen::VectorXd raw_norm = (M.rowwise() - means).colwise().norm().transpose();
  r.sweeps = demean(M, groups, opt);
  // Grand means are restored so the constant is identified alongside absorbed effects.
  if (!groups.empty()) M.rowwise() += means;

  for (Eigen::Index j = 1; j <= p; ++j) {
    double resid_norm = (M.col(j).array() - M.col(j).mean()).matrix().norm();
    if (!(resid_norm > 1e-9 * std::max(raw_norm(j), 1e-300)))
      throw numerical_error("RankDeficient", "regressor '" + pb.names[static_cast<std::size_t>(j - 1)] +
                                                 "' is constant or absorbed by fixed effects");
  }
  Eigen::MatrixXd D(n, p + 1);
  D.col(0).setOnes();
  D.rightCols(p) = M.rightCols(p);
  Eigen::VectorXd yd = M.col(0);

  Eigen::VectorXd colnorm = D.colwise().norm();
  Eigen::MatrixXd Dn = D * colnorm.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Dn);
  qr.setThreshold(1e-10);
  if (qr.rank() < p + 1) throw numerical_error("RankDeficient", "design is rank deficient");
  r.coef = qr.solve(yd).cwiseQuotient(colnorm);
  r.residuals = yd - D * r.coef;

  double sst = (raw_y.array() - raw_y.mean()).square().sum();
  r.r2 = sst > 0 ? 1.0 - r.residuals.squaredNorm() / sst : 0.0;

  auto cov = cluster_se(D, r.residuals, cl, absorbed_parameters(groups, cl));
  r.cov = cov.cov;
  r.se = cov.se;
  r.n_clusters = cov.clusters;
  r.pvalue.resize(p + 1);
  boost::math::students_t dist(static_cast<double>(cov.clusters - 1));
  for (Eigen::Index j = 0; j <= p; ++j) {
    double t = r.se(j) > 0 ? r.coef(j) / r.se(j) : std::nan("");
    r.pvalue(j) = std::isnan(t) ? std::nan("") : 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
  }
  r.names.push_back("Constant");
  for (const auto& nm : pb.names) r.names.push_back(nm);
  return r;
}

} // namespace arbminer
