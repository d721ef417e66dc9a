#include "tvgam/binning.hpp"

#include <algorithm>
#include <cmath>

#include "tvgam/cohort.hpp"
#include "tvgam/error.hpp"

namespace tvgam {

namespace {

// For each target quantile j/max_bins, takes the boundary between distinct
// values whose cumulative count is closest to the target (ties go low).
std::vector<double> quantile_edges(const std::vector<double>& distinct,
                                   const std::vector<std::size_t>& cumulative, std::size_t n,
                                   std::size_t max_bins) {
  std::vector<std::size_t> cuts;  // cut after distinct[k]
  for (std::size_t j = 1; j < max_bins; ++j) {
    const double target =
        static_cast<double>(n) * static_cast<double>(j) / static_cast<double>(max_bins);
    // First boundary whose cumulative count reaches the target, then compare
    // with its predecessor.
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end() - 1, target,
                                     [](std::size_t c, double t) { return static_cast<double>(c) < t; });
    std::size_t best = static_cast<std::size_t>(it - cumulative.begin());
    if (best == cumulative.size() - 1) best = cumulative.size() - 2;
    if (best > 0) {
      const double here = std::abs(static_cast<double>(cumulative[best]) - target);
      const double before = std::abs(static_cast<double>(cumulative[best - 1]) - target);
      if (before <= here) best = best - 1;
    }
    cuts.push_back(best);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> edges;
  edges.reserve(cuts.size());
  for (std::size_t k : cuts) {
    const double lo = distinct[k];
    const double hi = distinct[k + 1];
    double mid = lo / 2.0 + hi / 2.0;
    if (!(mid > lo) || mid > hi) mid = hi;
    edges.push_back(mid);
  }
  return edges;
}

}  // namespace

std::size_t BinMap::bin_of(double v) const {
  if (is_missing(v)) return missing_bin();
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
}

double BinMap::bin_lower(std::size_t bin) const {
  return bin == 0 ? min_value : edges[bin - 1];
}

double BinMap::bin_upper(std::size_t bin) const {
  return bin >= edges.size() ? max_value : edges[bin];
}

BinMap build_bins(std::span<const double> column, std::size_t max_bins, std::string feature) {
  if (max_bins == 0) throw UsageError("max_bins must be positive");
  BinMap map;
  map.feature = std::move(feature);

  std::vector<double> values;
  values.reserve(column.size());
  for (double v : column) {
    if (is_missing(v)) {
      map.has_missing_bin = true;
    } else {
      values.push_back(v);
    }
  }
  if (values.empty()) {
    throw DataError("cannot bin feature '" + map.feature + "': every value is missing");
  }
  std::sort(values.begin(), values.end());
  map.min_value = values.front();
  map.max_value = values.back();

  std::vector<double> distinct;
  std::vector<std::size_t> cumulative;  // values <= distinct[k]
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (distinct.empty() || values[i] != distinct.back()) {
      distinct.push_back(values[i]);
      cumulative.push_back(0);
    }
    cumulative.back() = i + 1;
  }
  if (distinct.size() > 1 && max_bins > 1) {
    map.edges = quantile_edges(distinct, cumulative, values.size(), max_bins);
  }
  map.counts.assign(map.bin_count(), 0);
  for (double v : column) ++map.counts[map.bin_of(v)];
  return map;
}

}  // namespace tvgam
