#pragma once

#include <span>
#include <vector>

namespace arbminer {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0; // sample SD (n - 1)
  double min = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double p90 = 0.0;
  double p95 = 0.0;
  double max = 0.0;
};

// Percentile with linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);
Summary describe(std::span<const double> values);
double pearson(std::span<const double> x, std::span<const double> y);

} // namespace arbminer
