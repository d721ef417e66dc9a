#include "tvgam/stats.hpp"

#include <algorithm>
#include <cmath>

#include "tvgam/error.hpp"

namespace tvgam {

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw UsageError("quantile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Band bag_band(std::span<const double> replicates, double spread_scale) {
  Band band;
  band.mean = mean(replicates);
  double lo = band.mean;
  double hi = band.mean;
  if (replicates.size() >= kPercentileMinBags) {
    lo = quantile(replicates, 0.025);
    hi = quantile(replicates, 0.975);
  } else if (replicates.size() >= 2) {
    const double half = 1.96 * sample_sd(replicates);
    lo = band.mean - half;
    hi = band.mean + half;
  }
  band.lower = std::min(band.mean, band.mean + spread_scale * (lo - band.mean));
  band.upper = std::max(band.mean, band.mean + spread_scale * (hi - band.mean));
  return band;
}

}  // namespace tvgam
