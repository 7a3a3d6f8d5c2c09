#pragma once

#include "arbminer/clean.hpp"
#include "arbminer/pricing.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace arbminer {

// Every knob a stage reads. Filled from a key=value file, then from flags.
struct PipelineConfig {
  std::vector<std::string> leaked;
  std::string family;
  std::string public_file;
  std::string rates_dir;
  std::string volume_file;
  std::filesystem::path out_dir = ".";

  std::string dedup_method = "trade_id";
  bool include_thk_primaries = false;
  bool keep_last_day = false;
  bool anonymize = true;
  std::string willy_ids;
  std::string anomalous_users;
  std::string markus_ids = "634";
  std::string sample_cutoff = "2013-04-01";

  int fee_spec = 5;
  std::string volume_scale = "log";
  int logit_spec = 5;
  bool skip_logit = false;

  std::int64_t dt = 300;
  std::string dq = "10";
  std::string regime = "actual";
  std::string fee_sign = "economic";

  std::size_t min_length = 5;
  std::int64_t max_gap = 60;
  std::int64_t learning_max_days = 0; // 0 disables the filter

  std::string table = "all";
  std::string proxy = "d_currencies";
  std::string grid = "default";

  std::uint64_t seed = 1;
  std::size_t noise_trades = 10000;
  std::size_t planted = 200;
  std::size_t slot_pool = 0;
  std::size_t bursts = 0;
  double duplicate_rate = 0.02;
  bool strict = false;
};

std::vector<UserId> parse_id_list(const std::string& text);

// Returns the process exit code: 0 ok, 1 usage, 2 input format, 3 numerical.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace arbminer
