#pragma once

#include "arbminer/matcher.hpp"
#include "arbminer/pricing.hpp"
#include "arbminer/profiles.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace arbminer {

// Versioned CSV schemas for the files passed between pipeline stages.
inline constexpr int kStageVersion = 1;

std::string ledger_to_csv(std::span<const Leg> legs);
std::vector<Leg> ledger_from_csv(const std::filesystem::path& path);

std::string actions_to_csv(std::span<const Leg> legs, std::span<const ArbitrageAction> actions);
std::vector<ArbitrageAction> actions_from_csv(const std::filesystem::path& path, std::span<const Leg> legs);

std::string priced_to_csv(std::span<const Leg> legs, std::span<const PricedAction> priced);
std::vector<PricedAction> priced_from_csv(const std::filesystem::path& path, std::span<const Leg> legs);

std::string profiles_to_csv(std::span<const UserProfile> profiles);
std::vector<UserProfile> profiles_from_csv(const std::filesystem::path& path);

std::string metaorders_to_csv(std::span<const ArbitrageAction> actions, std::span<const Metaorder> metaorders);

} // namespace arbminer
