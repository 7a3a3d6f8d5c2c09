#pragma once

#include "arbminer/ledger.hpp"
#include "arbminer/matcher.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace arbminer {

enum class FeeRegime { None = 0, Actual = 1, Expected = 2 };
std::string_view to_string(FeeRegime r);
std::optional<FeeRegime> parse_fee_regime(std::string_view s);

// Economic: fees reduce what the trader receives and add to what is paid.
// AsPrinted: the alternative sign placement kept for comparison runs.
enum class FeeSign { Economic, AsPrinted };

class RateTable {
public:
  void add(const RateBar& bar);
  void add_series(std::span<const RateBar> bars);
  static RateTable load_directory(const std::filesystem::path& dir);

  bool has_series(Currency base, Currency quote) const;
  std::optional<double> open(Currency base, Currency quote, Instant hour) const;

  // Units of `sell` obtained per unit of `buy` at the hour. Uses the direct
  // series, its inverse, or a USD cross when neither series exists.
  std::optional<double> official_rate(Currency buy, Currency sell, Instant hour) const;
  // |open_t - open_{t-1}| / open_{t-1} * 100 in the dyad's code orientation.
  std::optional<double> delta_r(const Dyad& dyad, Instant hour) const;

  std::size_t series_count() const { return series_.size(); }
  std::vector<RateBar> bars() const;

private:
  std::map<std::pair<Currency, Currency>, std::map<std::int64_t, double>> series_;
};

// Implied rate CUR_B -> CUR_S of an action: fiat of the sell leg per fiat of the buy leg.
// Throws DegenerateLeg when a denominator is not positive.
double implied_rate(const Leg& buy, const Leg& sell, FeeRegime regime, FeeSign sign = FeeSign::Economic);
double spread_pct(double implied, double official);

// Value of the action in USD: the USD leg if there is one, else the buy leg converted.
std::optional<double> usd_equiv(const Leg& buy, const Leg& sell, Instant hour, const RateTable& rates);

struct PricedAction {
  ArbitrageAction action;
  std::optional<double> off_er;
  std::array<std::optional<double>, 3> imp_er;
  std::array<std::optional<double>, 3> spread;
  std::optional<double> usd;
  std::optional<double> delta_r;
  bool excluded_missing_rate = false;
  bool degenerate = false;
};

std::vector<PricedAction> price_actions(std::span<const Leg> legs, std::span<const ArbitrageAction> actions,
                                        const RateTable& rates, FeeSign sign = FeeSign::Economic);

} // namespace arbminer
