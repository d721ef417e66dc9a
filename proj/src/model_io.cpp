#include "tvgam/model_io.hpp"

#include "tvgam/error.hpp"

namespace tvgam {

using nlohmann::json;

json to_json(const GamConfig& cfg) {
  return {{"max_bins", cfg.max_bins},
          {"day_bins", cfg.day_bins},
          {"learning_rate", cfg.learning_rate},
          {"boosting_rounds_main", cfg.boosting_rounds_main},
          {"boosting_rounds_interaction", cfg.boosting_rounds_interaction},
          {"max_leaves_main", cfg.max_leaves_main},
          {"max_cells_interaction", cfg.max_cells_interaction},
          {"min_samples_leaf", cfg.min_samples_leaf},
          {"bag_count", cfg.bag_count},
          {"bag_fraction", cfg.bag_fraction},
          {"early_stop_patience", cfg.early_stop_patience},
          {"early_stop_tolerance", cfg.early_stop_tolerance},
          {"validation_fraction", cfg.validation_fraction},
          {"rng_seed", cfg.rng_seed},
          {"subsample_ci_correction", cfg.subsample_ci_correction}};
}

GamConfig gam_config_from_json(const json& j) {
  GamConfig cfg;
  cfg.max_bins = j.value("max_bins", cfg.max_bins);
  cfg.day_bins = j.value("day_bins", cfg.day_bins);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.boosting_rounds_main = j.value("boosting_rounds_main", cfg.boosting_rounds_main);
  cfg.boosting_rounds_interaction =
      j.value("boosting_rounds_interaction", cfg.boosting_rounds_interaction);
  cfg.max_leaves_main = j.value("max_leaves_main", cfg.max_leaves_main);
  cfg.max_cells_interaction = j.value("max_cells_interaction", cfg.max_cells_interaction);
  cfg.min_samples_leaf = j.value("min_samples_leaf", cfg.min_samples_leaf);
  cfg.bag_count = j.value("bag_count", cfg.bag_count);
  cfg.bag_fraction = j.value("bag_fraction", cfg.bag_fraction);
  cfg.early_stop_patience = j.value("early_stop_patience", cfg.early_stop_patience);
  cfg.early_stop_tolerance = j.value("early_stop_tolerance", cfg.early_stop_tolerance);
  cfg.validation_fraction = j.value("validation_fraction", cfg.validation_fraction);
  cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
  cfg.subsample_ci_correction = j.value("subsample_ci_correction", cfg.subsample_ci_correction);
  return cfg;
}

json to_json(const BinMap& map) {
  return {{"feature", map.feature},         {"edges", map.edges},
          {"has_missing_bin", map.has_missing_bin}, {"min_value", map.min_value},
          {"max_value", map.max_value},     {"counts", map.counts}};
}

BinMap bin_map_from_json(const json& j) {
  BinMap map;
  map.feature = j.at("feature").get<std::string>();
  map.edges = j.at("edges").get<std::vector<double>>();
  map.has_missing_bin = j.at("has_missing_bin").get<bool>();
  map.min_value = j.at("min_value").get<double>();
  map.max_value = j.at("max_value").get<double>();
  map.counts = j.value("counts", std::vector<std::size_t>{});
  if (!std::is_sorted(map.edges.begin(), map.edges.end()) ||
      std::adjacent_find(map.edges.begin(), map.edges.end()) != map.edges.end()) {
    throw DataError("bin edges for '" + map.feature + "' are not strictly increasing");
  }
  return map;
}

json to_json(const GamModel& model) {
  json features = json::array();
  for (std::size_t f = 0; f < model.features.size(); ++f) {
    features.push_back({{"name", model.features[f]},
                        {"bins", to_json(model.bin_maps[f])},
                        {"scores", model.mains[f].scores}});
  }
  json interactions = json::array();
  for (const auto& shape : model.interactions) {
    interactions.push_back({{"feature", shape.feature},
                            {"day_bins", to_json(shape.day_edges)},
                            {"feature_bins", shape.feature_bins},
                            {"grid", shape.grid}});
  }
  return {{"intercept", model.intercept},
          {"day_feature", model.day_feature},
          {"features", std::move(features)},
          {"interactions", std::move(interactions)},
          {"config", to_json(model.config)}};
}

GamModel gam_model_from_json(const json& j) {
  GamModel model;
  model.intercept = j.at("intercept").get<double>();
  model.day_feature = j.at("day_feature").get<std::string>();
  model.config = gam_config_from_json(j.at("config"));
  for (const auto& item : j.at("features")) {
    const auto name = item.at("name").get<std::string>();
    auto map = bin_map_from_json(item.at("bins"));
    auto scores = item.at("scores").get<std::vector<double>>();
    if (scores.size() != map.bin_count()) {
      throw DataError("score count for '" + name + "' does not match its bins");
    }
    model.features.push_back(name);
    model.bin_maps.push_back(std::move(map));
    model.mains.push_back({name, std::move(scores)});
  }
  for (const auto& item : j.at("interactions")) {
    ShapeInteraction shape;
    shape.feature = item.at("feature").get<std::string>();
    shape.day_edges = bin_map_from_json(item.at("day_bins"));
    shape.feature_bins = item.at("feature_bins").get<std::size_t>();
    shape.grid = item.at("grid").get<std::vector<double>>();
    const auto f = model.feature_index(shape.feature);
    if (!f) throw DataError("interaction feature '" + shape.feature + "' lacks a main effect");
    if (shape.feature_bins != model.bin_maps[*f].bin_count() ||
        shape.grid.size() != shape.feature_bins * shape.day_bins()) {
      throw DataError("interaction grid for '" + shape.feature + "' has the wrong size");
    }
    model.interactions.push_back(std::move(shape));
  }
  return model;
}

json to_json(const BagEnsemble& ensemble) {
  json specs = json::array();
  for (const auto& s : ensemble.feature_specs) {
    json item = {{"name", s.name},
                 {"kind", to_string(s.kind)},
                 {"unit", s.unit},
                 {"role", to_string(s.role)}};
    if (!s.group.empty()) item["group"] = s.group;
    if (!s.rule.empty()) item["rule"] = s.rule;
    specs.push_back(std::move(item));
  }
  json members = json::array();
  for (const auto& m : ensemble.members) members.push_back(to_json(m));
  return {{"format", "tvgam-ensemble"},
          {"version", kModelFormatVersion},
          {"table_rows", ensemble.table_rows},
          {"seed", ensemble.members.empty() ? 0 : ensemble.config().rng_seed},
          {"feature_specs", std::move(specs)},
          {"interaction_features", ensemble.interaction_features},
          {"members", std::move(members)}};
}

BagEnsemble ensemble_from_json(const json& j) {
  try {
    if (j.value("format", "") != "tvgam-ensemble") throw DataError("not a tvgam model file");
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw DataError("unsupported model format version " + j.at("version").dump());
    }
    BagEnsemble e;
    e.table_rows = j.at("table_rows").get<std::size_t>();
    e.interaction_features = j.at("interaction_features").get<std::vector<std::string>>();
    for (const auto& item : j.at("feature_specs")) {
      FeatureSpec s;
      s.name = item.at("name").get<std::string>();
      s.kind = parse_feature_kind(item.at("kind").get<std::string>());
      s.unit = item.value("unit", "");
      s.role = parse_feature_role(item.at("role").get<std::string>());
      s.group = item.value("group", "");
      s.rule = item.value("rule", "");
      e.feature_specs.push_back(std::move(s));
    }
    for (const auto& item : j.at("members")) e.members.push_back(gam_model_from_json(item));
    if (e.members.empty()) throw DataError("model file has no members");
    const auto& cfg = e.config();
    for (std::size_t b = 0; b < e.members.size(); ++b) {
      e.bag_rows.push_back(bag_sample(e.table_rows, cfg.bag_fraction, cfg.rng_seed, b));
    }
    return e;
  } catch (const json::exception& ex) {
    throw DataError(std::string("invalid model JSON: ") + ex.what());
  }
}

std::string serialize(const BagEnsemble& ensemble) { return to_json(ensemble).dump(1) + "\n"; }

BagEnsemble parse_ensemble(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw DataError(std::string("model file is not valid JSON: ") + ex.what());
  }
  return ensemble_from_json(j);
}

}  // namespace tvgam
