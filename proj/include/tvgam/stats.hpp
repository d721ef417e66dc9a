#pragma once

#include <span>
#include <vector>

namespace tvgam {

double mean(std::span<const double> values);

// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> values);

// Linear-interpolation quantile (Hyndman-Fan type 7) of unsorted values.
double quantile(std::span<const double> values, double q);

// Central estimate and 95% band of a statistic replicated across bags.
struct Band {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Bag count at or above which percentile bounds are used instead of the
// normal approximation.
inline constexpr std::size_t kPercentileMinBags = 20;

// Summarizes per-bag replicates. With at least kPercentileMinBags replicates
// the bounds are the 2.5/97.5 percentiles, otherwise mean -/+ 1.96 SD.
// Deviations of the bounds from the mean are multiplied by spread_scale
// (1 leaves them untouched). The band always contains the mean.
Band bag_band(std::span<const double> replicates, double spread_scale = 1.0);

}  // namespace tvgam
