#pragma once

#include "arbminer/econometrics.hpp"
#include "arbminer/pricing.hpp"
#include "arbminer/profiles.hpp"

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace arbminer {

enum class AbilityProxy { DCurrencies, LogCurrencies, LogActions, DMetaorder, DAggressive, PC1 };
std::string_view to_string(AbilityProxy p);
std::optional<AbilityProxy> parse_proxy(std::string_view s);
const std::vector<AbilityProxy>& all_proxies();
double proxy_value(const UserProfile& p, AbilityProxy proxy);

struct RegressionSpec {
  FeeRegime outcome = FeeRegime::Actual;
  AbilityProxy proxy = AbilityProxy::DCurrencies;
  bool interaction = false; // dR x proxy model
  bool fe_hour = false;
  bool fe_dyad = false;
  bool fe_user = false;
  // Interaction model without user effects: also enter the proxy on its own.
  bool proxy_main_effect = false;
};

inline constexpr double kUsdScale = 10000.0;

struct RegressionRow {
  UserId user = 0;
  int dyad = 0;
  std::int64_t hour = 0;
  double spread = 0.0;
  double usd = 0.0; // already divided by kUsdScale
  std::optional<double> delta_r;
  double proxy = 0.0;
};

// Priced actions with an outcome under the regime and a USD value; rate
// exclusions are dropped here.
std::vector<RegressionRow> regression_rows(std::span<const PricedAction> priced, std::span<const UserProfile> profiles,
                                           const RegressionSpec& spec);

RegressionResult run_eq1(std::span<const RegressionRow> rows, const RegressionSpec& spec);
RegressionResult run_eq2(std::span<const RegressionRow> rows, const RegressionSpec& spec);
RegressionResult run_eq1(std::span<const PricedAction> priced, std::span<const UserProfile> profiles,
                         const RegressionSpec& spec);
RegressionResult run_eq2(std::span<const PricedAction> priced, std::span<const UserProfile> profiles,
                         const RegressionSpec& spec);

std::string proxy_label(AbilityProxy p);
inline constexpr const char* kUsdLabel = "Equiv. $";
inline constexpr const char* kDeltaRLabel = "dR";

struct TableColumn {
  std::string label;
  RegressionResult result;
  bool fe_user = false, fe_hour = false, fe_dyad = false;
};

// Coefficient rows with stars, SE rows in parentheses, FE flags, N and R^2.
void write_regression_table(std::ostream& out, std::span<const TableColumn> columns);

// The standard layouts: four FE columns of the level model, six proxies of the level model with both
// FE, and twelve interaction columns alternating no FE / all FE.
std::vector<TableColumn> table_eq1_fe_layout(std::span<const PricedAction> priced,
                                             std::span<const UserProfile> profiles, FeeRegime regime);
std::vector<TableColumn> table_eq1_proxy_layout(std::span<const PricedAction> priced,
                                                std::span<const UserProfile> profiles, FeeRegime regime);
std::vector<TableColumn> table_eq2_layout(std::span<const PricedAction> priced, std::span<const UserProfile> profiles,
                                          FeeRegime regime);

} // namespace arbminer
