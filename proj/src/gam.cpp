#include "tvgam/gam.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "boosting.hpp"
#include "tvgam/error.hpp"
#include "tvgam/parallel.hpp"
#include "tvgam/rng.hpp"

namespace tvgam {

void GamConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw UsageError(std::string(name) + " must be positive");
  };
  positive(max_bins, "max_bins");
  positive(day_bins, "day_bins");
  positive(max_leaves_main, "max_leaves_main");
  positive(max_cells_interaction, "max_cells_interaction");
  positive(min_samples_leaf, "min_samples_leaf");
  positive(bag_count, "bag_count");
  positive(early_stop_patience, "early_stop_patience");
  if (max_bins > 65000 || day_bins > 65000) throw UsageError("bin counts must be <= 65000");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw UsageError("learning_rate must be in (0, 1]");
  }
  if (!(bag_fraction > 0.0 && bag_fraction <= 1.0)) {
    throw UsageError("bag_fraction must be in (0, 1]");
  }
  if (!(early_stop_tolerance >= 0.0 && early_stop_tolerance < 1.0)) {
    throw UsageError("early_stop_tolerance must be in [0, 1)");
  }
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw UsageError("validation_fraction must be in [0, 1)");
  }
}

std::optional<std::size_t> GamModel::feature_index(std::string_view name) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> GamModel::interaction_index(std::string_view name) const {
  for (std::size_t i = 0; i < interactions.size(); ++i) {
    if (interactions[i].feature == name) return i;
  }
  return std::nullopt;
}

namespace {

void check_trainable(const CohortTable& table) {
  table.require_analysis_ready();
  std::size_t pos = 0;
  for (std::size_t r = 0; r < table.rows(); ++r) pos += static_cast<std::size_t>(table.outcome(r));
  const std::size_t neg = table.rows() - pos;
  if (pos == 0 || neg == 0) throw DataError("degenerate outcome: a single class in the cohort");
  if (pos < 2 || neg < 2) throw DataError("need at least two rows of each outcome class");
}

// Bin maps and zero shapes for every modeled feature.
GamModel skeleton(const CohortTable& table, const GamConfig& cfg) {
  GamModel model;
  model.config = cfg;
  model.features = table.schema().modeled_features();
  model.day_feature = table.schema().feature(table.schema().day_index()).name;
  for (const auto& name : model.features) {
    model.bin_maps.push_back(build_bins(table.column(name), cfg.max_bins, name));
    model.mains.push_back({name, std::vector<double>(model.bin_maps.back().bin_count(), 0.0)});
  }
  return model;
}

void add_interaction_shapes(GamModel& model, const std::vector<std::string>& features,
                            const BinMap& day_map) {
  for (const auto& name : features) {
    auto f = model.feature_index(name);
    if (!f) throw DataError("interaction feature '" + name + "' lacks a main effect");
    if (model.interaction_index(name)) continue;
    ShapeInteraction shape;
    shape.feature = name;
    shape.day_edges = day_map;
    shape.feature_bins = model.bin_maps[*f].bin_count();
    shape.grid.assign(shape.feature_bins * day_map.bin_count(), 0.0);
    model.interactions.push_back(std::move(shape));
  }
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

const BinMap* interaction_day_map(const GamModel& model) {
  return model.interactions.empty() ? nullptr : &model.interactions.front().day_edges;
}

struct MemberFit {
  GamModel mains_only;
  GamModel model;
  detail::Split split;
  std::vector<std::size_t> term_rounds;
};

// Mains plus interactions for one bag on precomputed bins, each interaction
// term stopping on the bag's own held-out rows.
MemberFit fit_member(const GamModel& base, const detail::BinnedTable& data,
                     std::span<const std::size_t> rows, const std::vector<std::string>& inter,
                     const BinMap& day_map, const GamConfig& cfg, std::size_t stream) {
  MemberFit fit;
  fit.split = detail::stratified_split(rows, data.y, cfg.validation_fraction,
                                       derive_seed(cfg.rng_seed, detail::kSplitStream, stream));
  detail::require_both_classes(fit.split.train, data.y, "bag training split");
  GamModel model = base;
  model.intercept = detail::base_rate_logit(fit.split.train, data.y);
  detail::boost_mains(model, data, fit.split, cfg, nullptr);
  if (!inter.empty() && cfg.boosting_rounds_interaction > 0) {
    add_interaction_shapes(model, inter, day_map);
    fit.mains_only = model;
    fit.term_rounds = detail::boost_interactions(model, data, fit.split, cfg, nullptr);
  }
  fit.model = std::move(model);
  return fit;
}

// Per-term median of the bags' stopping rounds (lower median).
std::vector<std::size_t> pooled_rounds(const std::vector<MemberFit>& fits) {
  std::vector<std::size_t> pooled(fits.front().term_rounds.size());
  std::vector<std::size_t> column(fits.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    for (std::size_t b = 0; b < fits.size(); ++b) column[b] = fits[b].term_rounds[i];
    const auto mid = column.begin() + static_cast<std::ptrdiff_t>((column.size() - 1) / 2);
    std::nth_element(column.begin(), mid, column.end());
    pooled[i] = *mid;
  }
  return pooled;
}

}  // namespace

GamModel fit_main_effects(const CohortTable& table, const GamConfig& cfg, FitTrace* trace) {
  cfg.validate();
  check_trainable(table);
  GamModel model = skeleton(table, cfg);
  const auto data = detail::bin_table(model, nullptr, table);
  const auto rows = all_rows(table.rows());
  const auto split = detail::stratified_split(
      rows, data.y, cfg.validation_fraction, derive_seed(cfg.rng_seed, detail::kSplitStream, 0));
  detail::require_both_classes(split.train, data.y, "training split");
  model.intercept = detail::base_rate_logit(split.train, data.y);
  detail::boost_mains(model, data, split, cfg, trace);
  return model;
}

GamModel fit_time_interactions(const GamModel& model, const CohortTable& table,
                               const std::vector<std::string>& interaction_features,
                               const GamConfig& cfg, FitTrace* trace) {
  cfg.validate();
  for (const auto& name : interaction_features) {
    if (!model.feature_index(name)) {
      throw DataError("interaction feature '" + name + "' lacks a main effect");
    }
  }
  if (cfg.boosting_rounds_interaction == 0 || interaction_features.empty()) return model;
  check_trainable(table);

  GamModel out = model;
  const BinMap day_map = out.interactions.empty()
                             ? build_bins(table.column(table.schema().day_index()), cfg.day_bins,
                                          out.day_feature)
                             : out.interactions.front().day_edges;
  add_interaction_shapes(out, interaction_features, day_map);
  const auto data = detail::bin_table(out, &day_map, table);
  const auto rows = all_rows(table.rows());
  const auto split = detail::stratified_split(
      rows, data.y, cfg.validation_fraction, derive_seed(cfg.rng_seed, detail::kSplitStream, 0));
  detail::boost_interactions(out, data, split, cfg, trace);
  return out;
}

GamModel center_model(const GamModel& model, const CohortTable& table) {
  GamModel out = model;
  const auto data = detail::bin_table(out, interaction_day_map(out), table);
  detail::center(out, data);
  return out;
}

double predict_logit(const GamModel& model, const PatientRecord& record) {
  auto value_of = [&](const std::string& name) {
    auto it = record.values.find(name);
    if (it == record.values.end() || !it->second) return kMissing;
    return *it->second;
  };
  double z = model.intercept;
  for (std::size_t f = 0; f < model.mains.size(); ++f) {
    z += model.mains[f].scores[model.bin_maps[f].bin_of(value_of(model.features[f]))];
  }
  if (!model.interactions.empty()) {
    double day = value_of(model.day_feature);
    if (is_missing(day)) day = record.admission_day;
    for (const auto& shape : model.interactions) {
      const auto f = *model.feature_index(shape.feature);
      z += shape.at(model.bin_maps[f].bin_of(value_of(shape.feature)),
                    shape.day_edges.bin_of(day));
    }
  }
  return z;
}

std::vector<double> predict_logits(const GamModel& model, const CohortTable& table) {
  const auto data = detail::bin_table(model, interaction_day_map(model), table);
  std::vector<double> z(table.rows(), model.intercept);
  for (std::size_t r = 0; r < z.size(); ++r) {
    for (std::size_t f = 0; f < model.mains.size(); ++f) {
      z[r] += model.mains[f].scores[data.features[f][r]];
    }
    for (const auto& shape : model.interactions) {
      const auto f = *model.feature_index(shape.feature);
      z[r] += shape.at(data.features[f][r], data.day[r]);
    }
  }
  return z;
}

double BagEnsemble::spread_scale() const {
  const auto& cfg = config();
  if (!cfg.subsample_ci_correction || cfg.bag_fraction >= 1.0) return 1.0;
  return std::sqrt(cfg.bag_fraction / (1.0 - cfg.bag_fraction));
}

const FeatureSpec* BagEnsemble::spec(std::string_view name) const {
  for (const auto& s : feature_specs) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<std::size_t> bag_sample(std::size_t n, double fraction, std::uint64_t seed,
                                    std::size_t bag) {
  std::vector<std::size_t> rows = all_rows(n);
  const auto m = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))), 1, n);
  if (m == n) return rows;
  Rng rng(derive_seed(seed, detail::kBagStream, bag));
  for (std::size_t i = 0; i < m; ++i) {
    std::swap(rows[i], rows[i + rng.below(n - i)]);
  }
  rows.resize(m);
  std::sort(rows.begin(), rows.end());
  return rows;
}

BagEnsemble fit_bagged(const CohortTable& table, const GamConfig& cfg,
                       const std::vector<std::string>& interaction_features, unsigned threads) {
  cfg.validate();
  check_trainable(table);
  const GamModel base = skeleton(table, cfg);
  for (const auto& name : interaction_features) {
    if (!base.feature_index(name)) {
      throw DataError("interaction feature '" + name + "' lacks a main effect");
    }
  }
  const BinMap day_map =
      build_bins(table.column(table.schema().day_index()), cfg.day_bins, base.day_feature);
  const auto data = detail::bin_table(base, &day_map, table);

  BagEnsemble ensemble;
  ensemble.table_rows = table.rows();
  ensemble.interaction_features = interaction_features;
  for (const auto& name : base.features) {
    ensemble.feature_specs.push_back(table.schema().feature(name));
  }
  ensemble.members.resize(cfg.bag_count);
  ensemble.bag_rows.resize(cfg.bag_count);
  std::vector<MemberFit> fits(cfg.bag_count);
  parallel_for(cfg.bag_count, threads, [&](std::size_t b) {
    ensemble.bag_rows[b] = bag_sample(table.rows(), cfg.bag_fraction, cfg.rng_seed, b);
    fits[b] = fit_member(base, data, ensemble.bag_rows[b], interaction_features, day_map, cfg, b);
  });

  // A single bag's held-out rows judge a time interaction poorly: stopping
  // where either the training or the held-out evidence runs out shrinks real
  // effects toward zero. With several bags, every member is refit with the
  // median stopping round of each term.
  const bool pool = cfg.bag_count > 1 && !fits.front().term_rounds.empty();
  const auto rounds = pool ? pooled_rounds(fits) : std::vector<std::size_t>{};
  parallel_for(cfg.bag_count, threads, [&](std::size_t b) {
    auto& fit = fits[b];
    if (pool) {
      fit.model = std::move(fit.mains_only);
      detail::boost_interactions(fit.model, data, fit.split, cfg, nullptr, rounds);
    }
    detail::center(fit.model, data);
    ensemble.members[b] = std::move(fit.model);
  });
  return ensemble;
}

std::vector<double> predict_logits(const BagEnsemble& ensemble, const CohortTable& table) {
  std::vector<double> z(table.rows(), 0.0);
  for (const auto& member : ensemble.members) {
    const auto m = predict_logits(member, table);
    for (std::size_t r = 0; r < z.size(); ++r) z[r] += m[r];
  }
  for (auto& v : z) v /= static_cast<double>(ensemble.members.size());
  return z;
}

double predict_logit(const BagEnsemble& ensemble, const PatientRecord& record) {
  double z = 0.0;
  for (const auto& member : ensemble.members) z += predict_logit(member, record);
  return z / static_cast<double>(ensemble.members.size());
}

std::vector<ShapePoint> shape_with_ci(const BagEnsemble& ensemble, std::string_view feature,
                                      std::optional<int> day) {
  if (ensemble.members.empty()) throw DataError("empty ensemble");
  const auto& first = ensemble.members.front();
  const auto f = first.feature_index(feature);
  if (!f) throw DataError("unknown feature '" + std::string(feature) + "'");
  const auto& map = first.bin_maps[*f];

  std::vector<ShapePoint> out;
  std::vector<double> replicate(ensemble.members.size());
  for (std::size_t b = 0; b < map.bin_count(); ++b) {
    for (std::size_t m = 0; m < ensemble.members.size(); ++m) {
      const auto& member = ensemble.members[m];
      const auto mf = member.feature_index(feature);
      if (!mf) throw DataError("feature '" + std::string(feature) + "' missing from a bag member");
      double v = member.mains[*mf].scores[b];
      if (day) {
        if (auto i = member.interaction_index(feature)) {
          const auto& shape = member.interactions[*i];
          v += shape.at(b, shape.day_edges.bin_of(*day));
        }
      }
      replicate[m] = v;
    }
    const Band band = bag_band(replicate, ensemble.spread_scale());
    ShapePoint p;
    p.bin = b;
    p.missing_bin = b == map.missing_bin();
    if (!p.missing_bin) {
      p.lower_edge = map.bin_lower(b);
      p.upper_edge = map.bin_upper(b);
      p.midpoint = map.bin_midpoint(b);
    }
    p.count = b < map.counts.size() ? map.counts[b] : 0;
    p.mean = band.mean;
    p.lower95 = band.lower;
    p.upper95 = band.upper;
    out.push_back(p);
  }
  return out;
}

}  // namespace tvgam
