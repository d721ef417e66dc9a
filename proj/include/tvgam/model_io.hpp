#pragma once

#include <string>

#include <json.hpp>

#include "tvgam/gam.hpp"

namespace tvgam {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const GamConfig& cfg);
GamConfig gam_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BinMap& map);
BinMap bin_map_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GamModel& model);
GamModel gam_model_from_json(const nlohmann::json& j);

// Versioned ensemble document. Bag row sets are not stored; they are
// regenerated from the seed and the fitting table's row count.
nlohmann::json to_json(const BagEnsemble& ensemble);
BagEnsemble ensemble_from_json(const nlohmann::json& j);

// Text written to model.json.
std::string serialize(const BagEnsemble& ensemble);
BagEnsemble parse_ensemble(const std::string& text);

}  // namespace tvgam
