#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tvgam/binning.hpp"
#include "tvgam/cohort.hpp"
#include "tvgam/stats.hpp"

namespace tvgam {

struct GamConfig {
  std::size_t max_bins = 64;
  std::size_t day_bins = 32;
  double learning_rate = 0.05;
  std::size_t boosting_rounds_main = 2000;
  std::size_t boosting_rounds_interaction = 1000;
  std::size_t max_leaves_main = 3;
  std::size_t max_cells_interaction = 4;
  std::size_t min_samples_leaf = 2;
  std::size_t bag_count = 25;
  double bag_fraction = 0.85;
  // Rounds without held-out improvement before boosting stops. Main effects
  // share one stopping point; each interaction term has its own.
  std::size_t early_stop_patience = 50;
  // An interaction round counts as an improvement only if it lowers the
  // term's held-out loss by this fraction of the starting loss.
  double early_stop_tolerance = 1e-4;
  // Share of each bag held out for early stopping, stratified by outcome.
  double validation_fraction = 0.15;
  std::uint64_t rng_seed = 0;
  // Rescale bag spread to full-sample variability when bags are subsamples
  // drawn without replacement (see BagEnsemble::spread_scale).
  bool subsample_ci_correction = true;

  // Throws UsageError on non-positive sizes or out-of-range rates.
  void validate() const;

  bool operator==(const GamConfig&) const = default;
};

// Additive contribution (log-odds) per bin of one feature; the last slot is
// the missing bin.
struct ShapeMain {
  std::string feature;
  std::vector<double> scores;

  bool operator==(const ShapeMain&) const = default;
};

// Feature x admission-day contribution grid, row-major over
// (feature bin, day bin). Both axes include their missing slot.
struct ShapeInteraction {
  std::string feature;
  BinMap day_edges;
  std::size_t feature_bins = 0;
  std::vector<double> grid;

  std::size_t day_bins() const { return day_edges.bin_count(); }
  double at(std::size_t feature_bin, std::size_t day_bin) const {
    return grid[feature_bin * day_bins() + day_bin];
  }
  double& at(std::size_t feature_bin, std::size_t day_bin) {
    return grid[feature_bin * day_bins() + day_bin];
  }

  bool operator==(const ShapeInteraction&) const = default;
};

struct GamModel {
  double intercept = 0.0;
  // Modeled features in schema order; bin_maps and mains are parallel to it.
  std::vector<std::string> features;
  std::vector<BinMap> bin_maps;
  std::vector<ShapeMain> mains;
  std::vector<ShapeInteraction> interactions;
  std::string day_feature;
  GamConfig config;

  std::optional<std::size_t> feature_index(std::string_view name) const;
  std::optional<std::size_t> interaction_index(std::string_view name) const;

  bool operator==(const GamModel&) const = default;
};

// Per-round losses recorded while boosting. Training losses are only
// computed when a trace is requested.
struct FitTrace {
  std::vector<double> main_train_loss;
  std::vector<double> main_valid_loss;
  std::vector<double> interaction_train_loss;
  std::vector<double> interaction_valid_loss;
  std::size_t main_rounds_kept = 0;
  std::size_t interaction_rounds_kept = 0;
  // Updates kept for each interaction term, in model order.
  std::vector<std::size_t> interaction_term_rounds;
};

// Fits intercept and main-effect shapes by cyclic boosting on all rows of the
// table, holding out a stratified validation share for early stopping. The
// intercept is the training base-rate log-odds. The model is not centered.
GamModel fit_main_effects(const CohortTable& table, const GamConfig& cfg,
                          FitTrace* trace = nullptr);

// Boosts feature x day interaction grids on the residual of the frozen main
// effects, using the same validation split as fit_main_effects. Each term
// stops on its own cumulative held-out loss change and keeps its best grid.
GamModel fit_time_interactions(const GamModel& model, const CohortTable& table,
                               const std::vector<std::string>& interaction_features,
                               const GamConfig& cfg, FitTrace* trace = nullptr);

// Shifts every shape to zero mean over the table's rows and folds the
// offsets into the intercept. Predictions are unchanged.
GamModel center_model(const GamModel& model, const CohortTable& table);

double predict_logit(const GamModel& model, const PatientRecord& record);
std::vector<double> predict_logits(const GamModel& model, const CohortTable& table);

struct BagEnsemble {
  std::vector<GamModel> members;
  // Row indices (into the fitting table) each member was trained on,
  // including its early-stopping holdout.
  std::vector<std::vector<std::size_t>> bag_rows;
  std::size_t table_rows = 0;
  // Descriptions of the modeled features (kind, role, group, rule).
  std::vector<FeatureSpec> feature_specs;
  std::vector<std::string> interaction_features;

  const GamConfig& config() const { return members.front().config; }
  // Multiplier applied to the bag spread when forming confidence bands. A
  // subsample of fraction f varies around the full-sample fit with about
  // (1 - f) / f times the variance the full-sample fit has around the truth,
  // so deviations are scaled by sqrt(f / (1 - f)) when the correction is on.
  double spread_scale() const;
  const FeatureSpec* spec(std::string_view name) const;

  bool operator==(const BagEnsemble&) const = default;
};

// Rows of a table of n rows drawn for one bag (sorted, without replacement).
std::vector<std::size_t> bag_sample(std::size_t n, double fraction, std::uint64_t seed,
                                    std::size_t bag);

// Fits cfg.bag_count models, each on its own subsample with mains followed by
// the listed time interactions, then centers each on the full table. With
// more than one bag every interaction term is refit for the median of its
// per-bag stopping rounds. The result is identical for any thread count.
BagEnsemble fit_bagged(const CohortTable& table, const GamConfig& cfg,
                       const std::vector<std::string>& interaction_features = {},
                       unsigned threads = 1);

// Mean ensemble logit per row.
std::vector<double> predict_logits(const BagEnsemble& ensemble, const CohortTable& table);
double predict_logit(const BagEnsemble& ensemble, const PatientRecord& record);

struct ShapePoint {
  std::size_t bin = 0;
  bool missing_bin = false;
  double lower_edge = 0.0;
  double upper_edge = 0.0;
  double midpoint = 0.0;
  // Training rows in this bin.
  std::size_t count = 0;
  double mean = 0.0;
  double lower95 = 0.0;
  double upper95 = 0.0;
};

// Per-bin across-bag mean of the feature's main score (plus its interaction
// at `day` when given) with a 95% band.
std::vector<ShapePoint> shape_with_ci(const BagEnsemble& ensemble, std::string_view feature,
                                      std::optional<int> day = std::nullopt);

}  // namespace tvgam
