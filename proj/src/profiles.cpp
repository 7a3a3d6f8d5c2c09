#include "arbminer/profiles.hpp"

#include "arbminer/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace arbminer {

std::vector<Metaorder> detect_metaorders(std::span<const Leg> legs, std::span<const ArbitrageAction> actions,
                                         std::span<const std::optional<double>> usd, const MetaorderOptions& opt) {
  std::map<std::tuple<UserId, Currency, Currency>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& a = actions[i];
    groups[{a.user, legs[a.buy].currency, legs[a.sell].currency}].push_back(i);
  }
  std::vector<Metaorder> out;
  for (auto& [key, idx] : groups) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return actions[a].execution_time < actions[b].execution_time;
    });
    std::size_t start = 0;
    for (std::size_t k = 1; k <= idx.size(); ++k) {
      bool breaks = k == idx.size() ||
                    (actions[idx[k]].execution_time - actions[idx[k - 1]].execution_time).count() > opt.max_gap;
      if (!breaks) continue;
      if (k - start >= opt.min_length) {
        Metaorder m;
        std::tie(m.user, m.buy_currency, m.sell_currency) = key;
        m.actions.assign(idx.begin() + static_cast<std::ptrdiff_t>(start), idx.begin() + static_cast<std::ptrdiff_t>(k));
        auto span_s = (actions[idx[k - 1]].execution_time - actions[idx[start]].execution_time).count();
        m.mean_delay = static_cast<double>(span_s) / static_cast<double>(k - start - 1);
        bool all_usd = !usd.empty();
        double total_usd = 0;
        for (auto a : m.actions) {
          m.total_bitcoins += legs[actions[a].buy].bitcoins.to_double();
          if (!usd.empty() && usd[a]) total_usd += *usd[a];
          else all_usd = false;
        }
        if (all_usd) m.total_usd = total_usd;
        out.push_back(std::move(m));
      }
      start = k;
    }
  }
  std::sort(out.begin(), out.end(), [&](const Metaorder& a, const Metaorder& b) {
    if (a.user != b.user) return a.user < b.user;
    return actions[a.actions.front()].execution_time < actions[b.actions.front()].execution_time;
  });
  return out;
}

AggressiveSummary classify_aggressive(std::span<const Leg> legs, std::span<const ArbitrageAction> actions) {
  AggressiveSummary s;
  for (const auto& a : actions) {
    const auto& b = legs[a.buy].aggressive;
    const auto& sl = legs[a.sell].aggressive;
    std::optional<bool> v;
    if ((b && *b) || (sl && *sl)) v = true;
    else if (b || sl) v = false;
    if (!v) ++s.unannotated;
    else if (*v) ++s.aggressive;
    s.per_action.push_back(v);
  }
  return s;
}

std::vector<UserProfile> build_profiles(std::span<const Leg> legs, std::span<const ArbitrageAction> actions,
                                        std::span<const Metaorder> metaorders, const AggressiveSummary& aggressive) {
  struct Acc {
    std::size_t n = 0;
    std::set<std::string> dyads;
    std::set<Currency> currencies;
    bool aggressive = false;
    Instant first{Instant::max()};
    std::string first_dyad;
    std::optional<Instant> first_new_market;
  };
  std::vector<std::size_t> order(actions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return actions[a].execution_time < actions[b].execution_time;
  });
  std::map<UserId, Acc> acc;
  for (auto i : order) {
    const auto& a = actions[i];
    Acc& u = acc[a.user];
    std::string dyad = a.dyad.name();
    if (u.n == 0) {
      u.first = a.execution_time;
      u.first_dyad = dyad;
    } else if (!u.first_new_market && dyad != u.first_dyad) {
      u.first_new_market = a.execution_time;
    }
    ++u.n;
    u.dyads.insert(dyad);
    u.currencies.insert(legs[a.buy].currency);
    u.currencies.insert(legs[a.sell].currency);
    if (i < aggressive.per_action.size() && aggressive.per_action[i].value_or(false)) u.aggressive = true;
  }
  std::unordered_set<UserId> with_meta;
  for (const auto& m : metaorders) with_meta.insert(m.user);

  std::vector<UserProfile> out;
  for (const auto& [user, u] : acc) {
    UserProfile p;
    p.user = user;
    p.n_actions = u.n;
    p.n_markets = u.dyads.size();
    p.n_currencies = u.currencies.size();
    p.d_currencies = p.n_currencies >= 3 ? 1.0 : 0.0;
    p.log_currencies = std::log(static_cast<double>(p.n_currencies));
    p.log_actions = std::log(static_cast<double>(p.n_actions));
    p.d_metaorder = with_meta.count(user) ? 1.0 : 0.0;
    p.d_aggressive = u.aggressive ? 1.0 : 0.0;
    if (u.first_new_market)
      p.days_to_new_market = std::chrono::floor<std::chrono::days>(*u.first_new_market - u.first).count();
    out.push_back(p);
  }
  return out;
}

PcaResult principal_component(const Eigen::MatrixXd& data, Eigen::Index sign_column) {
  const Eigen::Index n = data.rows(), p = data.cols();
  if (n < 2) throw numerical_error("DegenerateCovariance", "need at least two observations");
  Eigen::RowVectorXd mean = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - mean;
  Eigen::RowVectorXd sd = (centered.array().square().colwise().sum() / static_cast<double>(n)).sqrt();
  for (Eigen::Index j = 0; j < p; ++j)
    if (!(sd(j) > 1e-12 * std::max(1.0, std::fabs(mean(j)))))
      throw numerical_error("DegenerateCovariance", "indicator " + std::to_string(j) + " has zero variance");
  Eigen::MatrixXd z = centered.array().rowwise() / sd.array();
  Eigen::MatrixXd corr = z.transpose() * z / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr);
  if (es.info() != Eigen::Success) throw numerical_error("DegenerateCovariance", "eigendecomposition failed");
  PcaResult r;
  r.eigenvalues = es.eigenvalues().reverse();
  r.loading = es.eigenvectors().col(p - 1).normalized();
  if (r.loading(sign_column) < 0) r.loading = -r.loading;
  r.explained = r.eigenvalues(0) / r.eigenvalues.sum();
  r.scores = z * r.loading;
  return r;
}

PcaResult pca_scores(std::vector<UserProfile>& profiles) {
  Eigen::MatrixXd data(static_cast<Eigen::Index>(profiles.size()), 4);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    data.row(static_cast<Eigen::Index>(i)) << p.d_currencies, p.log_actions, p.d_metaorder, p.d_aggressive;
  }
  PcaResult r = principal_component(data, 1);
  for (std::size_t i = 0; i < profiles.size(); ++i) profiles[i].pc1_score = r.scores(static_cast<Eigen::Index>(i));
  return r;
}

std::vector<ArbitrageAction> learning_filter(std::span<const UserProfile> profiles,
                                             std::span<const ArbitrageAction> actions, std::int64_t max_days) {
  std::unordered_set<UserId> slow;
  for (const auto& p : profiles)
    if (p.n_markets > 1 && p.days_to_new_market && *p.days_to_new_market > max_days) slow.insert(p.user);
  std::vector<ArbitrageAction> out;
  for (const auto& a : actions)
    if (!slow.count(a.user)) out.push_back(a);
  return out;
}

} // namespace arbminer
