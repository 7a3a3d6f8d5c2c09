#pragma once

#include "arbminer/ledger.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace arbminer {

struct MatchConfig {
  std::int64_t max_delta_t = 300; // seconds
  Decimal max_delta_q = Decimal(10); // percent
};

// Relative volume gap |B-S| / ((B+S)/2) kept as an exact ratio.
struct VolumeGap {
  Decimal::Rep diff = 0;
  Decimal::Rep sum = 0;

  static VolumeGap of(const Decimal& b, const Decimal& s);
  double percent() const;
  bool within(const Decimal& max_pct) const;
  friend bool operator<(const VolumeGap& a, const VolumeGap& b) { return a.diff * b.sum < b.diff * a.sum; }
  friend bool operator==(const VolumeGap& a, const VolumeGap& b) { return a.diff * b.sum == b.diff * a.sum; }
};

struct Candidate {
  std::size_t buy = 0; // indices into the ledger
  std::size_t sell = 0;
  std::int64_t delta_t = 0;
  VolumeGap gap;
};

struct ArbitrageAction {
  std::size_t buy = 0;
  std::size_t sell = 0;
  UserId user = 0;
  Dyad dyad;
  std::int64_t delta_t = 0;
  double delta_q = 0.0;
  Instant execution_time{}; // earlier leg
  Instant execution_hour{};
};

// Users that traded in at least two fiat currencies.
std::vector<UserId> eligible_users(std::span<const Leg> legs);

// Candidate pairs among `user_legs` (indices of one user's legs, any order).
std::vector<Candidate> enumerate_candidates(std::span<const Leg> legs, std::span<const std::size_t> user_legs,
                                            const MatchConfig& cfg);

// Greedy one-to-one resolution: legs in chronological order (ties by trade id)
// take their best free partner by (delta_t, delta_q, partner trade id).
std::vector<ArbitrageAction> resolve_matches(std::span<const Leg> legs, std::span<const Candidate> candidates);

// All users; output ordered by (user, execution time, buy trade id).
std::vector<ArbitrageAction> match_ledger(std::span<const Leg> legs, const MatchConfig& cfg);

ArbitrageAction make_action(std::span<const Leg> legs, std::size_t buy, std::size_t sell);
void sort_actions(std::span<const Leg> legs, std::vector<ArbitrageAction>& actions);

struct SweepCell {
  std::int64_t max_delta_t = 0;
  Decimal max_delta_q;
  std::size_t candidates = 0;
  std::size_t actions = 0;
  std::size_t users = 0;
};

std::vector<SweepCell> sweep_thresholds(std::span<const Leg> legs, std::span<const std::int64_t> delta_ts,
                                        std::span<const Decimal> delta_qs);

} // namespace arbminer
