#pragma once

// Internal boosting machinery shared by the single-model and bagged fits.

#include <cstdint>
#include <span>
#include <vector>

#include "tvgam/gam.hpp"

namespace tvgam::detail {

// Stream purposes for derive_seed.
inline constexpr std::uint64_t kBagStream = 0xBA6;
inline constexpr std::uint64_t kSplitStream = 0x5917;

// Bin indices of every table row for each model feature, plus the
// interaction day bin and outcome.
struct BinnedTable {
  std::vector<std::vector<std::uint16_t>> features;
  std::vector<std::uint16_t> day;
  std::vector<std::uint8_t> y;

  std::size_t rows() const { return y.size(); }
};

BinnedTable bin_table(const GamModel& model, const BinMap* day_map, const CohortTable& table);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
};

// Holds out round(fraction * count) rows of each outcome class.
Split stratified_split(std::span<const std::size_t> rows, const std::vector<std::uint8_t>& y,
                       double fraction, std::uint64_t seed);

// Throws DataError unless the rows contain both outcome classes.
void require_both_classes(std::span<const std::size_t> rows, const std::vector<std::uint8_t>& y,
                          const char* what);

double base_rate_logit(std::span<const std::size_t> rows, const std::vector<std::uint8_t>& y);

void boost_mains(GamModel& model, const BinnedTable& data, const Split& split,
                 const GamConfig& cfg, FitTrace* trace);

// Each term stops on its own held-out loss unless `fixed_rounds` is given, in
// which case term i receives exactly fixed_rounds[i] updates and the
// held-out rows are ignored. Returns the number of updates kept per term.
std::vector<std::size_t> boost_interactions(GamModel& model, const BinnedTable& data,
                                            const Split& split, const GamConfig& cfg,
                                            FitTrace* trace,
                                            std::span<const std::size_t> fixed_rounds = {});

// Centers every shape over all rows of `data`.
void center(GamModel& model, const BinnedTable& data);

// Leaf updates for a 1-D histogram over value bins 0..value_bins-1 plus the
// missing slot at index value_bins. Returns all zeros when no split helps.
std::vector<double> fit_tree_1d(std::span<const double> grad, std::span<const double> hess,
                                std::span<const std::size_t> count, std::size_t value_bins,
                                const GamConfig& cfg);

// Cell updates for a rows x cols histogram, at most cfg.max_cells_interaction
// rectangles (one cut on the primary axis, then one per side on the other).
std::vector<double> fit_tree_2d(std::span<const double> grad, std::span<const double> hess,
                                std::span<const std::size_t> count, std::size_t rows,
                                std::size_t cols, const GamConfig& cfg);

}  // namespace tvgam::detail
