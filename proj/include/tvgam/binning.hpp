#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tvgam {

// Quantile bin map for one feature. Value bins are numbered 0..edges.size();
// a value v falls in bin (number of edges <= v). Missing values always map to
// the slot after the last value bin, whether or not training data had any.
struct BinMap {
  std::string feature;
  std::vector<double> edges;
  bool has_missing_bin = false;
  // Smallest and largest non-missing training values.
  double min_value = 0.0;
  double max_value = 0.0;
  // Rows per bin (value bins, then missing) in the data the map was built on.
  std::vector<std::size_t> counts;

  std::size_t value_bins() const { return edges.size() + 1; }
  std::size_t bin_count() const { return edges.size() + 2; }
  std::size_t missing_bin() const { return edges.size() + 1; }

  std::size_t bin_of(double v) const;

  // Range covered by a value bin, clipped to the observed training range.
  double bin_lower(std::size_t bin) const;
  double bin_upper(std::size_t bin) const;
  double bin_midpoint(std::size_t bin) const { return 0.5 * (bin_lower(bin) + bin_upper(bin)); }

  bool operator==(const BinMap&) const = default;
};

// Builds at most max_bins value bins with cuts at empirical quantiles. Cut
// positions depend only on value ranks, so any strictly increasing transform
// of the column yields the same bin for every row. Each edge sits at the
// midpoint between the two neighbouring distinct values. Throws DataError if
// every value is missing.
BinMap build_bins(std::span<const double> column, std::size_t max_bins, std::string feature = {});

}  // namespace tvgam
