#pragma once

#include "arbminer/ledger.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace arbminer {

enum class DedupMethod { Conservative, Aggressive, TradeId, Pairs };
std::string_view to_string(DedupMethod m);
std::optional<DedupMethod> parse_dedup_method(std::string_view s);

// Row accounting for the cleaning stages. Removal counters add up so that
// input_rows == output_rows + removed().
struct CleanReport {
  std::size_t input_rows = 0;
  std::size_t output_rows = 0;

  std::size_t duplicates = 0;
  std::size_t orphan_legs = 0; // rows dropped as orphans (Pairs only)
  std::size_t self_trades = 0;
  std::size_t last_day = 0;
  std::size_t deleted_users = 0;
  std::size_t zero_bitcoins = 0;
  std::size_t intermediary_rows = 0;
  std::size_t thk_incomplete = 0;

  // Informational; not removals.
  std::size_t orphans_seen = 0;
  std::size_t tibanne_corrected = 0;
  std::size_t tibanne_uncorrectable = 0;
  std::size_t sekjpy_corrected = 0;
  std::size_t markus_remapped = 0;
  std::size_t willy_remapped = 0;
  std::map<std::string, std::size_t> duplicates_by_method;

  std::size_t removed() const;
  bool reconciles() const { return input_rows == output_rows + removed(); }
  std::string to_text() const;
};

struct DedupResult {
  std::vector<Leg> legs;
  CleanReport report;
  std::vector<std::size_t> removed_rows; // indices into the input
};

DedupResult dedup(std::span<const Leg> legs, DedupMethod method);

struct SanityOptions {
  bool drop_last_day = true;
  bool include_thk_primaries = false;
  UserId markus_source = 698630;
  UserId markus_target = 635;
  std::vector<UserId> willy_ids;
  UserId willy_target = 1000000;
  Instant sekjpy_cutoff = make_instant(2013, 9, 12);
  double reconcile_tolerance = 0.01;
};

struct SanityResult {
  std::vector<Leg> legs;
  std::vector<PublicTradeRecord> public_records;
  CleanReport report;
  std::vector<std::string> uncorrectable_trades;
};

SanityResult sanity_filter(std::vector<Leg> legs, std::vector<PublicTradeRecord> public_records,
                           const SanityOptions& options);

struct Anonymized {
  std::vector<Leg> legs;
  std::map<UserId, UserId> mapping; // original -> dense id
};

// Dense rank from 1 over sorted original ids; sentinel ids are left as is.
Anonymized anonymize_users(std::vector<Leg> legs);

// Merges legs sharing (user, second, side, currency). Amounts and fees are summed
// exactly; the trade id lists member ids joined by '+'.
std::vector<Leg> aggregate_same_second(std::span<const Leg> legs);

inline Instant default_sample_cutoff() { return make_instant(2013, 4, 1); }
std::vector<Leg> restrict_sample(std::span<const Leg> legs, Instant cutoff = default_sample_cutoff());

struct MergeResult {
  std::vector<Leg> legs;
  std::size_t misses = 0;
};

// Annotates order kind and aggressiveness from the public record of the trade.
MergeResult merge_public(std::vector<Leg> legs, std::span<const PublicTradeRecord> records);

struct VolumeComparison {
  Day day{};
  double leaked = 0.0;
  double external = 0.0;
  double normalized_diff = 0.0; // (leaked - external) / leaked, NaN if leaked == 0
  double moving_average = 0.0;  // centred, over available days in the window
};

std::vector<VolumeComparison> compare_daily_volumes(std::span<const Leg> legs, std::span<const DailyVolume> external,
                                                    int window_days = 15);
// Daily USD fiat volume, each trade counted once.
std::map<Day, double> leaked_daily_usd_volume(std::span<const Leg> legs);

} // namespace arbminer
