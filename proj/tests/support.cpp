#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace arbtest {

Decimal dec(const std::string& s) {
  auto d = Decimal::parse(s);
  if (!d) throw std::invalid_argument("bad decimal in test: " + s);
  return *d;
}

Leg leg(const std::string& trade_id, const std::string& when, UserId user, Side side, Currency currency,
        const std::string& btc, const std::string& money, const std::string& money_jpy) {
  Leg l;
  l.trade_id = trade_id;
  auto t = parse_datetime(when);
  if (!t) throw std::invalid_argument("bad time in test: " + when);
  l.timestamp = *t;
  l.user_id = user;
  l.side = side;
  l.currency = currency;
  l.bitcoins = dec(btc);
  l.money = dec(money);
  l.money_jpy = dec(money_jpy);
  l.money_rate = dec("1");
  l.money_fee_rate = dec("1");
  return l;
}

std::vector<Leg> dedup_fixture() {
  struct Row {
    std::size_t label;
    const char* id;
    UserId user;
    Side side;
    const char* jpy;
  };
  const Row rows[] = {
      {930, "35837", 2824, Side::Buy, "586.89"},  {931, "35837", 388, Side::Sell, "586.89"},
      {932, "35838", 3111, Side::Buy, "578.42"},  {933, "35838", 388, Side::Sell, "578.42"},
      {934, "35839", 2824, Side::Buy, "570.20"},  {935, "35839", 388, Side::Sell, "570.20"},
      {936, "35840", 3111, Side::Buy, "570.00"},  {937, "35840", 388, Side::Sell, "570.00"},
      {938, "35841", 1000, Side::Buy, "570.00"},  {939, "35841", 388, Side::Sell, "570.00"},
  };
  std::vector<Leg> out;
  for (const auto& r : rows) {
    Leg l = leg(r.id, "2011-04-04 14:23:00", r.user, r.side, Currency::JPY, "10.0", r.jpy, r.jpy);
    l.source_row = r.label;
    out.push_back(l);
  }
  return out;
}

std::vector<std::size_t> row_labels(const std::vector<Leg>& legs) {
  std::vector<std::size_t> out;
  for (const auto& l : legs) out.push_back(l.source_row);
  return out;
}

std::vector<Leg> fig3_fixture() {
  struct P {
    int t; // tens of seconds
    const char* q;
    Side side;
    Currency c;
  };
  const P pts[] = {
      {18, "5", Side::Buy, Currency::USD},   {30, "1.1", Side::Sell, Currency::EUR},
      {22, "4.2", Side::Buy, Currency::EUR}, {57, "2.5", Side::Sell, Currency::USD},
      {65, "3.5", Side::Buy, Currency::GBP}, {69, "4.6", Side::Buy, Currency::USD},
      {88, "2.5", Side::Buy, Currency::EUR}, {116, "4", Side::Buy, Currency::USD},
      {121, "1.3", Side::Buy, Currency::GBP}, {130, "2", Side::Sell, Currency::GBP},
  };
  std::vector<Leg> out;
  int k = 0;
  for (const auto& p : pts) {
    Leg l = leg("f" + std::to_string(100 + k), "2012-05-01 00:00:00", 7, p.side, p.c, p.q, "100");
    l.timestamp += std::chrono::seconds{p.t * 10};
    l.source_row = static_cast<std::size_t>(k++);
    out.push_back(l);
  }
  return out;
}

MatchConfig fig3_config() { return {150, Decimal(40)}; }

std::vector<Leg> random_match_instance(Rng& rng, std::size_t n_legs) {
  static const Currency cs[] = {Currency::USD, Currency::EUR, Currency::GBP};
  static const char* sizes[] = {"1", "1.05", "0.95", "1.1", "2", "2.1", "0.5", "0.52", "10", "9.5", "1.00000001"};
  const Instant t0 = make_instant(2012, 6, 1);
  const auto n_users = 1 + rng.below(6);
  std::vector<Leg> out;
  for (std::size_t i = 0; i < n_legs; ++i) {
    Leg l;
    l.user_id = static_cast<UserId>(1 + rng.below(n_users));
    l.side = rng.chance(0.5) ? Side::Buy : Side::Sell;
    l.currency = cs[rng.below(3)];
    l.timestamp = t0 + std::chrono::seconds{rng.between(0, static_cast<std::int64_t>(n_legs) * 20)};
    if (rng.chance(0.7)) l.bitcoins = dec(sizes[rng.below(std::size(sizes))]);
    else l.bitcoins = Decimal::from_double(rng.uniform(0.01, 12.0), 8);
    l.money = dec("100");
    l.trade_id = std::to_string(100000 + rng.below(900000));
    if (rng.chance(0.1)) l.trade_id += "+" + std::to_string(100000 + rng.below(900000));
    // Occasionally reuse an earlier id so legs of one trade meet.
    if (!out.empty() && rng.chance(0.1)) l.trade_id = out[rng.below(out.size())].trade_id;
    out.push_back(l);
  }
  return out;
}

Eigen::MatrixXd dummy_design(const Eigen::MatrixXd& X, const std::vector<std::vector<std::int64_t>>& fe) {
  const Eigen::Index n = X.rows();
  std::vector<Eigen::VectorXd> cols;
  cols.push_back(Eigen::VectorXd::Ones(n));
  for (Eigen::Index j = 0; j < X.cols(); ++j) cols.push_back(X.col(j));
  for (const auto& dim : fe) {
    std::map<std::int64_t, int> levels;
    for (auto g : dim) levels.emplace(g, 0);
    bool first = true;
    for (auto& [g, unused] : levels) {
      if (first) {
        first = false;
        continue;
      }
      Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i)
        if (dim[static_cast<std::size_t>(i)] == g) d(i) = 1.0;
      cols.push_back(d);
    }
  }
  Eigen::MatrixXd D(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) D.col(static_cast<Eigen::Index>(j)) = cols[j];
  return D;
}

Eigen::VectorXd dummy_ols_slopes(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                 const std::vector<std::vector<std::int64_t>>& fe) {
  Eigen::MatrixXd D = dummy_design(X, fe);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(D);
  Eigen::VectorXd b = cod.solve(y);
  return b.segment(1, X.cols());
}

Eigen::MatrixXd dense_cluster_cov(const Eigen::MatrixXd& X, const Eigen::VectorXd& e,
                                  const std::vector<std::int64_t>& clusters) {
  const Eigen::Index n = X.rows(), k = X.cols();
  Eigen::MatrixXd bread = (X.transpose() * X).inverse();
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (clusters[static_cast<std::size_t>(i)] == clusters[static_cast<std::size_t>(j)])
        meat += e(i) * e(j) * X.row(i).transpose() * X.row(j);
  std::vector<std::int64_t> g(clusters);
  std::sort(g.begin(), g.end());
  const double G = static_cast<double>(std::unique(g.begin(), g.end()) - g.begin());
  const double c = G / (G - 1.0) * (static_cast<double>(n) - 1.0) / static_cast<double>(n - k);
  return c * bread * meat * bread;
}

std::vector<double> brute_rolling_volume(const std::vector<Leg>& legs) {
  std::vector<double> out(legs.size(), 0.0);
  for (std::size_t i = 0; i < legs.size(); ++i)
    for (std::size_t j = 0; j < legs.size(); ++j) {
      if (legs[j].user_id != legs[i].user_id) continue;
      const auto age = (legs[i].timestamp - legs[j].timestamp).count();
      if (age > 0 && age < 720 * 3600) out[i] += legs[j].bitcoins.to_double();
    }
  return out;
}

bool same_leg(const Leg& a, const Leg& b) {
  return a.trade_id == b.trade_id && a.timestamp == b.timestamp && a.user_id == b.user_id && a.side == b.side &&
         a.currency == b.currency && a.bitcoins == b.bitcoins && a.money == b.money && a.money_jpy == b.money_jpy &&
         a.money_fee == b.money_fee && a.bitcoin_fee == b.bitcoin_fee;
}

double rel_diff(double a, double b) { return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)}); }

FeInstance random_fe_instance(Rng& rng, std::size_t n, std::size_t n_fe) {
  FeInstance inst;
  const auto p = static_cast<Eigen::Index>(1 + rng.below(3));
  auto& pb = inst.problem;
  pb.X.resize(static_cast<Eigen::Index>(n), p);
  pb.y.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < p; ++j) pb.names.push_back("x" + std::to_string(j));
  for (std::size_t d = 0; d < n_fe; ++d) {
    const auto levels = 2 + rng.below(std::max<std::uint64_t>(2, n / 6));
    std::vector<std::int64_t> ids(n);
    for (auto& id : ids) id = static_cast<std::int64_t>(rng.below(levels)) * 7 + 3;
    inst.fe.push_back(ids);
    pb.fixed_effects.push_back({"fe" + std::to_string(d), ids});
  }
  const auto n_clusters = 2 + rng.below(15);
  for (std::size_t i = 0; i < n; ++i) pb.clusters.push_back(static_cast<std::int64_t>(rng.below(n_clusters)));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    double y = 0.3;
    for (Eigen::Index j = 0; j < p; ++j) {
      pb.X(i, j) = rng.normal() * (1 + j) + (j == 0 ? 5.0 : 0.0);
      y += (j + 1) * 0.7 * pb.X(i, j);
    }
    for (const auto& ids : inst.fe) y += std::sin(static_cast<double>(ids[static_cast<std::size_t>(i)]));
    pb.y(i) = y + rng.normal();
  }
  return inst;
}

} // namespace arbtest
