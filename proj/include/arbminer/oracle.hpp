#pragma once

#include "arbminer/matcher.hpp"

#include <span>
#include <vector>

namespace arbminer {

// Quadratic reference matcher: every pair of a user's legs is tested directly
// with decimal arithmetic, and each leg scans all of the user's legs for its
// partner. Same output contract and ordering as match_ledger.
std::vector<ArbitrageAction> brute_force_match(std::span<const Leg> legs, const MatchConfig& cfg);

} // namespace arbminer
