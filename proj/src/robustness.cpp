#include "arbminer/robustness.hpp"

#include "arbminer/csv.hpp"
#include "arbminer/error.hpp"

#include <cstdio>
#include <unordered_set>

namespace arbminer {

AnalysisRun analyse(std::span<const Leg> legs, const RateTable& rates, const MatchConfig& cfg, FeeSign sign) {
  AnalysisRun run;
  run.actions = match_ledger(legs, cfg);
  run.priced = price_actions(legs, run.actions, rates, sign);
  std::vector<std::optional<double>> usd;
  for (const auto& p : run.priced) usd.push_back(p.usd);
  run.metaorders = detect_metaorders(legs, run.actions, usd);
  run.aggressive = classify_aggressive(legs, run.actions);
  run.profiles = build_profiles(legs, run.actions, run.metaorders, run.aggressive);
  try {
    run.pca = pca_scores(run.profiles);
  } catch (const Error& e) {
    if (e.code() != "DegenerateCovariance") throw;
  }
  return run;
}

std::vector<PricedAction> apply_learning_filter(const AnalysisRun& run, std::int64_t max_days) {
  auto kept = learning_filter(run.profiles, run.actions, max_days);
  std::unordered_set<UserId> users;
  for (const auto& a : kept) users.insert(a.user);
  std::vector<PricedAction> out;
  for (const auto& p : run.priced)
    if (users.count(p.action.user)) out.push_back(p);
  return out;
}

RobustnessGrid RobustnessGrid::defaults() {
  RobustnessGrid g;
  g.thresholds = {{30, Decimal(1)}, {300, Decimal(10)}, {600, Decimal(20)}};
  g.regimes = {FeeRegime::Actual, FeeRegime::None, FeeRegime::Expected};
  g.learning_filter = {false, true};
  g.spec.fe_hour = g.spec.fe_dyad = true;
  return g;
}

std::vector<RobustnessCell> robustness_suite(std::span<const Leg> legs, const RateTable& rates,
                                             const RobustnessGrid& grid) {
  std::vector<RobustnessCell> cells;
  for (const auto& t : grid.thresholds) {
    std::optional<AnalysisRun> run;
    std::string run_error;
    try {
      run = analyse(legs, rates, t);
    } catch (const Error& e) {
      run_error = e.code() + ": " + e.what();
    }
    for (auto regime : grid.regimes)
      for (bool learning : grid.learning_filter) {
        RobustnessCell cell{t, regime, learning, std::nullopt, run_error};
        if (run) {
          try {
            RegressionSpec spec = grid.spec;
            spec.outcome = regime;
            auto priced = learning ? apply_learning_filter(*run, grid.learning_max_days) : run->priced;
            cell.result = spec.interaction ? run_eq2(priced, run->profiles, spec) : run_eq1(priced, run->profiles, spec);
          } catch (const Error& e) {
            cell.error = e.code() + ": " + e.what();
          }
        }
        cells.push_back(std::move(cell));
      }
  }
  return cells;
}

void write_robustness_table(std::ostream& out, std::span<const RobustnessCell> cells, std::string_view coefficient) {
  out << "delta_t,delta_q,regime,learning_filter,coefficient,estimate,std_error,stars,n,r2,error\n";
  for (const auto& c : cells) {
    std::vector<std::string> f = {std::to_string(c.thresholds.max_delta_t), c.thresholds.max_delta_q.to_string(),
                                  std::string(to_string(c.regime)), c.learning_filter ? "on" : "off",
                                  std::string(coefficient)};
    auto idx = c.result ? c.result->index_of(coefficient) : std::nullopt;
    if (idx) {
      auto k = static_cast<Eigen::Index>(*idx);
      f.push_back(format_double(c.result->coef(k)));
      f.push_back(format_double(c.result->se(k)));
      f.push_back(c.result->stars(*idx));
      f.push_back(std::to_string(c.result->n_used));
      f.push_back(format_double(c.result->r2));
    } else {
      f.insert(f.end(), 5, "");
    }
    f.push_back(c.error);
    out << join_csv(f) << "\n";
  }
}

} // namespace arbminer
