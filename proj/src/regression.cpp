#include "arbminer/regression.hpp"

#include "arbminer/csv.hpp"
#include "arbminer/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

namespace arbminer {

std::string_view to_string(AbilityProxy p) {
  switch (p) {
  case AbilityProxy::DCurrencies: return "d_currencies";
  case AbilityProxy::LogCurrencies: return "log_currencies";
  case AbilityProxy::LogActions: return "log_actions";
  case AbilityProxy::DMetaorder: return "d_metaorder";
  case AbilityProxy::DAggressive: return "d_aggressive";
  default: return "pc1";
  }
}

std::optional<AbilityProxy> parse_proxy(std::string_view s) {
  for (auto p : all_proxies())
    if (to_string(p) == lower(s)) return p;
  return std::nullopt;
}

const std::vector<AbilityProxy>& all_proxies() {
  static const std::vector<AbilityProxy> all = {AbilityProxy::DCurrencies, AbilityProxy::LogCurrencies,
                                                AbilityProxy::LogActions,  AbilityProxy::DMetaorder,
                                                AbilityProxy::DAggressive, AbilityProxy::PC1};
  return all;
}

std::string proxy_label(AbilityProxy p) {
  switch (p) {
  case AbilityProxy::DCurrencies: return "D(Currencies)";
  case AbilityProxy::LogCurrencies: return "Log(Currencies)";
  case AbilityProxy::LogActions: return "Log(Actions)";
  case AbilityProxy::DMetaorder: return "D(Metaorder)";
  case AbilityProxy::DAggressive: return "D(Aggressive)";
  default: return "PC1";
  }
}

double proxy_value(const UserProfile& p, AbilityProxy proxy) {
  switch (proxy) {
  case AbilityProxy::DCurrencies: return p.d_currencies;
  case AbilityProxy::LogCurrencies: return p.log_currencies;
  case AbilityProxy::LogActions: return p.log_actions;
  case AbilityProxy::DMetaorder: return p.d_metaorder;
  case AbilityProxy::DAggressive: return p.d_aggressive;
  default: return p.pc1_score;
  }
}

std::vector<RegressionRow> regression_rows(std::span<const PricedAction> priced, std::span<const UserProfile> profiles,
                                           const RegressionSpec& spec) {
  std::unordered_map<UserId, const UserProfile*> by_user;
  for (const auto& p : profiles) by_user[p.user] = &p;
  std::vector<RegressionRow> rows;
  for (const auto& pa : priced) {
    const auto& spread = pa.spread[static_cast<int>(spec.outcome)];
    if (pa.excluded_missing_rate || !spread || !pa.usd) continue;
    auto it = by_user.find(pa.action.user);
    if (it == by_user.end()) continue;
    RegressionRow r;
    r.user = pa.action.user;
    r.dyad = pa.action.dyad.code();
    r.hour = epoch_hours(pa.action.execution_hour);
    r.spread = *spread;
    r.usd = *pa.usd / kUsdScale;
    r.delta_r = pa.delta_r;
    r.proxy = proxy_value(*it->second, spec.proxy);
    rows.push_back(r);
  }
  return rows;
}

namespace {

OlsProblem base_problem(std::span<const RegressionRow> rows, const RegressionSpec& spec,
                        const std::vector<std::string>& names) {
  OlsProblem pb;
  const auto n = static_cast<Eigen::Index>(rows.size());
  pb.y.resize(n);
  pb.X.resize(n, static_cast<Eigen::Index>(names.size()));
  pb.names = names;
  FeDimension user{"User", {}}, hour{"Time", {}}, dyad{"Dyad", {}};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    pb.y(i) = r.spread;
    pb.clusters.push_back(r.user);
    user.ids.push_back(r.user);
    hour.ids.push_back(r.hour);
    dyad.ids.push_back(r.dyad);
  }
  if (spec.fe_user) pb.fixed_effects.push_back(std::move(user));
  if (spec.fe_hour) pb.fixed_effects.push_back(std::move(hour));
  if (spec.fe_dyad) pb.fixed_effects.push_back(std::move(dyad));
  return pb;
}

} // namespace

RegressionResult run_eq1(std::span<const RegressionRow> rows, const RegressionSpec& spec) {
  if (spec.fe_user)
    throw usage_error("InvalidSpec", "user fixed effects absorb the user-level proxy in the level regression");
  OlsProblem pb = base_problem(rows, spec, {proxy_label(spec.proxy), kUsdLabel});
  for (Eigen::Index i = 0; i < pb.y.size(); ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    pb.X(i, 0) = r.proxy;
    pb.X(i, 1) = r.usd;
  }
  return ols_fe(pb);
}

RegressionResult run_eq2(std::span<const RegressionRow> rows, const RegressionSpec& spec) {
  std::vector<RegressionRow> kept;
  for (const auto& r : rows)
    if (r.delta_r) kept.push_back(r);
  const bool main = spec.proxy_main_effect && !spec.fe_user;
  std::vector<std::string> names = {std::string(kDeltaRLabel) + " x " + proxy_label(spec.proxy), kDeltaRLabel};
  if (main) names.push_back(proxy_label(spec.proxy));
  names.push_back(kUsdLabel);
  OlsProblem pb = base_problem(kept, spec, names);
  for (Eigen::Index i = 0; i < pb.y.size(); ++i) {
    const auto& r = kept[static_cast<std::size_t>(i)];
    Eigen::Index c = 0;
    pb.X(i, c++) = *r.delta_r * r.proxy;
    pb.X(i, c++) = *r.delta_r;
    if (main) pb.X(i, c++) = r.proxy;
    pb.X(i, c++) = r.usd;
  }
  return ols_fe(pb);
}

RegressionResult run_eq1(std::span<const PricedAction> priced, std::span<const UserProfile> profiles,
                         const RegressionSpec& spec) {
  return run_eq1(regression_rows(priced, profiles, spec), spec);
}

RegressionResult run_eq2(std::span<const PricedAction> priced, std::span<const UserProfile> profiles,
                         const RegressionSpec& spec) {
  return run_eq2(regression_rows(priced, profiles, spec), spec);
}

namespace {

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

} // namespace

void write_regression_table(std::ostream& out, std::span<const TableColumn> columns) {
  std::vector<std::string> order;
  for (const auto& c : columns)
    for (const auto& n : c.result.names)
      if (n != "Constant" && std::find(order.begin(), order.end(), n) == order.end()) order.push_back(n);
  order.push_back("Constant");

  std::vector<std::string> head = {"variable"};
  for (const auto& c : columns) head.push_back(c.label);
  out << join_csv(head) << "\n";
  for (const auto& name : order) {
    std::vector<std::string> est = {name}, se = {""};
    for (const auto& c : columns) {
      auto i = c.result.index_of(name);
      if (!i) {
        est.emplace_back();
        se.emplace_back();
        continue;
      }
      auto k = static_cast<Eigen::Index>(*i);
      est.push_back(fixed4(c.result.coef(k)) + c.result.stars(*i));
      se.push_back("(" + fixed4(c.result.se(k)) + ")");
    }
    out << join_csv(est) << "\n" << join_csv(se) << "\n";
  }
  auto flag_row = [&](const char* label, auto pick) {
    std::vector<std::string> row = {label};
    for (const auto& c : columns) row.push_back(pick(c) ? "Y" : "N");
    out << join_csv(row) << "\n";
  };
  flag_row("User FE", [](const TableColumn& c) { return c.fe_user; });
  flag_row("Time FE", [](const TableColumn& c) { return c.fe_hour; });
  flag_row("Dyad FE", [](const TableColumn& c) { return c.fe_dyad; });
  std::vector<std::string> n = {"N"}, r2 = {"R-squared"}, g = {"Clusters"};
  for (const auto& c : columns) {
    n.push_back(std::to_string(c.result.n_used));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", c.result.r2);
    r2.push_back(buf);
    g.push_back(std::to_string(c.result.n_clusters));
  }
  out << join_csv(n) << "\n" << join_csv(r2) << "\n" << join_csv(g) << "\n";
}

std::vector<TableColumn> table_eq1_fe_layout(std::span<const PricedAction> priced,
                                             std::span<const UserProfile> profiles, FeeRegime regime) {
  std::vector<TableColumn> cols;
  const std::pair<bool, bool> fe[] = {{false, false}, {false, true}, {true, false}, {true, true}};
  int k = 1;
  for (auto [hour, dyad] : fe) {
    RegressionSpec s;
    s.outcome = regime;
    s.fe_hour = hour;
    s.fe_dyad = dyad;
    cols.push_back({"(" + std::to_string(k++) + ")", run_eq1(priced, profiles, s), false, hour, dyad});
  }
  return cols;
}

std::vector<TableColumn> table_eq1_proxy_layout(std::span<const PricedAction> priced,
                                                std::span<const UserProfile> profiles, FeeRegime regime) {
  std::vector<TableColumn> cols;
  int k = 1;
  for (auto p : all_proxies()) {
    RegressionSpec s;
    s.outcome = regime;
    s.proxy = p;
    s.fe_hour = s.fe_dyad = true;
    cols.push_back({"(" + std::to_string(k++) + ")", run_eq1(priced, profiles, s), false, true, true});
  }
  return cols;
}

std::vector<TableColumn> table_eq2_layout(std::span<const PricedAction> priced, std::span<const UserProfile> profiles,
                                          FeeRegime regime) {
  std::vector<TableColumn> cols;
  int k = 1;
  for (auto p : all_proxies())
    for (bool fe : {false, true}) {
      RegressionSpec s;
      s.outcome = regime;
      s.proxy = p;
      s.interaction = true;
      s.fe_user = s.fe_hour = s.fe_dyad = fe;
      cols.push_back({"(" + std::to_string(k++) + ")", run_eq2(priced, profiles, s), fe, fe, fe});
    }
  return cols;
}

} // namespace arbminer
