#pragma once

#include "arbminer/matcher.hpp"
#include "arbminer/pricing.hpp"
#include "arbminer/regression.hpp"

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace arbminer {

// Everything downstream of matching for one threshold pair.
struct AnalysisRun {
  std::vector<ArbitrageAction> actions;
  std::vector<PricedAction> priced;
  std::vector<Metaorder> metaorders;
  AggressiveSummary aggressive;
  std::vector<UserProfile> profiles;
  std::optional<PcaResult> pca;
};

// Matches, prices, detects metaorders and builds profiles (with PC1 when the
// indicators have variance).
AnalysisRun analyse(std::span<const Leg> legs, const RateTable& rates, const MatchConfig& cfg,
                    FeeSign sign = FeeSign::Economic);

// Keeps only priced actions that survive the learning filter.
std::vector<PricedAction> apply_learning_filter(const AnalysisRun& run, std::int64_t max_days);

struct RobustnessGrid {
  std::vector<MatchConfig> thresholds;
  std::vector<FeeRegime> regimes;
  std::vector<bool> learning_filter;
  std::int64_t learning_max_days = 14;
  RegressionSpec spec; // outcome field is overridden per cell

  static RobustnessGrid defaults();
};

struct RobustnessCell {
  MatchConfig thresholds;
  FeeRegime regime = FeeRegime::Actual;
  bool learning_filter = false;
  std::optional<RegressionResult> result;
  std::string error;
};

std::vector<RobustnessCell> robustness_suite(std::span<const Leg> legs, const RateTable& rates,
                                             const RobustnessGrid& grid);

void write_robustness_table(std::ostream& out, std::span<const RobustnessCell> cells, std::string_view coefficient);

} // namespace arbminer
