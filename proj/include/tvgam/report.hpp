#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvgam/baselines.hpp"
#include "tvgam/effects.hpp"
#include "tvgam/gam.hpp"
#include "tvgam/metrics.hpp"

namespace tvgam {

// Long format: subject,day,or,lower95,upper95.
void write_effects_csv(std::ostream& out, const std::vector<EffectSeries>& series);
nlohmann::json effects_json(const std::vector<EffectSeries>& series);
// Line chart of OR against day on a log axis, one shaded band per series.
void write_effects_svg(std::ostream& out, const std::vector<EffectSeries>& series,
                       const std::string& title);

void write_shape_csv(std::ostream& out, const std::string& feature,
                     const std::vector<ShapePoint>& shape);

// Table-1 layout: group, biomarker, rule, univariable OR and CI, then OR, CI
// and row count for each window.
void write_baseline_csv(std::ostream& out, const BaselineTable& table);
nlohmann::json baseline_json(const BaselineTable& table);

nlohmann::json roc_json(const RocResult& r);
void write_roc_curve_csv(std::ostream& out, std::span<const RocPoint> points);

// patient_id, admission_day, outcome, logit, probability.
void write_predictions_csv(std::ostream& out, const CohortTable& table,
                           std::span<const double> logits);

}  // namespace tvgam
