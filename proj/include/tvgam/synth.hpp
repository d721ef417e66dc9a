#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tvgam/cohort.hpp"
#include "tvgam/effects.hpp"

namespace tvgam {

// Linear interpolation through (x, y) knots, constant beyond the ends. A
// repeated x makes a step; the value at the step is the last knot's y.
struct PiecewiseLinear {
  std::vector<double> x;
  std::vector<double> y;

  static PiecewiseLinear constant(double value) { return {{0.0}, {value}}; }
  double operator()(double v) const;
  bool is_constant() const;
  void validate(std::string_view what) const;

  bool operator==(const PiecewiseLinear&) const = default;
};

enum class Distribution { normal, lognormal, bernoulli };

struct FeatureTruth {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  FeatureRole role = FeatureRole::lab;
  std::string unit;
  std::string group;
  std::string rule;
  bool model_input = true;

  Distribution distribution = Distribution::normal;
  // normal: mean, sd; lognormal: mu, sigma of the log; bernoulli: p.
  double a = 0.0;
  double b = 1.0;
  std::optional<double> min;
  std::optional<double> max;
  int decimals = 2;  // continuous values are rounded before effects apply
  double missing_rate = 0.0;

  // Contribution s(value) + h(day) * g(value) to the log-odds. g defaults
  // to the identity when unset.
  PiecewiseLinear static_effect = PiecewiseLinear::constant(0.0);
  std::optional<PiecewiseLinear> time_effect;
  std::optional<PiecewiseLinear> time_value;

  double contribution(double value, double day) const;
  bool operator==(const FeatureTruth&) const = default;
};

struct DaySegment {
  int lo = 0;
  int hi = 1;  // exclusive
  double weight = 1.0;

  bool operator==(const DaySegment&) const = default;
};

struct GroundTruth {
  double intercept = 0.0;
  std::string id_column = "patient_id";
  std::string day_feature = "admission_day";
  std::string outcome = "death";
  // Admission day: a segment is picked with probability proportional to its
  // weight, then a day uniformly within it.
  std::vector<DaySegment> day_segments{{0, 1, 1.0}};
  PiecewiseLinear day_effect = PiecewiseLinear::constant(0.0);
  // When set, deaths receive hours from admission to death ~ lognormal.
  std::optional<std::string> hours_to_death_feature;
  double hours_mu = 4.0;
  double hours_sigma = 1.0;
  std::vector<FeatureTruth> features;

  void validate() const;
  const FeatureTruth& feature(std::string_view name) const;
  FeatureSchema schema() const;
  // True log-odds for one patient; values are parallel to `features`.
  double logit(std::span<const double> values, double day) const;
  // True log OR of a binary feature (1 vs 0) at `day`.
  double log_or(std::string_view feature, double day) const;
  int max_day() const;

  bool operator==(const GroundTruth&) const = default;
};

GroundTruth ground_truth_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GroundTruth& truth);

// The bundled scenario: twelve binary lab biomarkers in thrombosis,
// inflammation, and other groups over a two-wave admission profile, with
// nonlinear demographic and vital effects and a day-50 step for D-dimer.
GroundTruth nyc_like_truth();
inline constexpr std::string_view kStepBiomarker = "d_dimer_high";

// Samples n patients. Rows are produced in chunks with their own derived RNG
// streams; missingness is applied after the outcome is drawn.
CohortTable generate_cohort(const GroundTruth& truth, std::size_t n, std::uint64_t seed);

// Long-format truth curves (subject, day, log_or, or) of every binary feature
// with a time effect or a nonzero static effect, plus group means.
void write_truth_curves(std::ostream& out, const GroundTruth& truth, const std::vector<int>& days);

struct RecoveryEntry {
  std::string subject;
  double max_abs_error = 0.0;  // log-odds scale
  int estimated_changepoint = 0;
  int true_changepoint = 0;
  double max_successive_diff = 0.0;  // of the fitted log OR
  double true_max_successive_diff = 0.0;
  double coverage = 0.0;  // share of grid days whose CI contains the truth
};

// Compares log(series OR) with the true log OR on the series' day grid. The
// changepoint is the grid day following the largest successive change.
RecoveryEntry recovery_error(const EffectSeries& series, const GroundTruth& truth,
                             std::string_view feature);
// Same, against the mean true log OR over the group's members.
RecoveryEntry recovery_error(const EffectSeries& series, const GroundTruth& truth,
                             const BiomarkerGroup& group);

// Groups declared by the truth's binary features, in first-appearance order.
std::vector<BiomarkerGroup> truth_groups(const GroundTruth& truth);

}  // namespace tvgam
