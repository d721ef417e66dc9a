#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tvgam {

enum class FeatureKind { continuous, binary, categorical };

enum class FeatureRole {
  demographic,
  comorbidity,
  outpatient_med,
  vital,
  lab,
  admission_day,
  outcome,
  // Carried through the pipeline but never modeled (e.g. hours to death).
  auxiliary,
};

std::string_view to_string(FeatureKind kind);
std::string_view to_string(FeatureRole role);
FeatureKind parse_feature_kind(std::string_view text);
FeatureRole parse_feature_role(std::string_view text);

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  std::string unit;
  FeatureRole role = FeatureRole::lab;
  // False for raw lab columns that have been replaced by a binarized rule.
  bool model_input = true;
  // Biomarker group (e.g. "thrombosis"); empty when ungrouped.
  std::string group;
  // Human-readable rule for derived biomarkers, e.g. "> 1000".
  std::string rule;

  bool operator==(const FeatureSpec&) const = default;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  // Throws DataError unless names are unique and exactly one feature has the
  // admission_day role and exactly one the outcome role.
  explicit FeatureSchema(std::vector<FeatureSpec> features, std::string id_column = "patient_id");

  const std::vector<FeatureSpec>& features() const { return features_; }
  const FeatureSpec& feature(std::size_t i) const { return features_[i]; }
  std::size_t size() const { return features_.size(); }

  std::optional<std::size_t> find(std::string_view name) const;
  // Throws DataError for unknown names.
  std::size_t index_of(std::string_view name) const;
  const FeatureSpec& feature(std::string_view name) const { return features_[index_of(name)]; }

  std::size_t day_index() const { return day_index_; }
  std::size_t outcome_index() const { return outcome_index_; }
  // Empty when the CSV carries no identifier column.
  const std::string& id_column() const { return id_column_; }

  // Features the GAM consumes, in schema order: model inputs excluding the
  // outcome and auxiliary columns. Admission day is included.
  std::vector<std::string> modeled_features() const;

  void add(FeatureSpec spec);
  void set_model_input(std::string_view name, bool value);

  bool operator==(const FeatureSchema&) const = default;

 private:
  void validate();

  std::vector<FeatureSpec> features_;
  std::string id_column_;
  std::size_t day_index_ = 0;
  std::size_t outcome_index_ = 0;
};

FeatureSchema schema_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const FeatureSchema& schema);

// Missing cells are stored as quiet NaN. The loader rejects non-finite text,
// so NaN in a table always means "not recorded".
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

struct PatientRecord {
  std::string patient_id;
  int admission_day = 0;
  int outcome_death = 0;
  std::map<std::string, std::optional<double>, std::less<>> values;
};

// Columnar patient table. Columns are parallel to the schema's features.
class CohortTable {
 public:
  CohortTable() = default;
  CohortTable(FeatureSchema schema, std::vector<std::string> patient_ids,
              std::vector<std::vector<double>> columns, std::vector<std::string> provenance = {});

  const FeatureSchema& schema() const { return schema_; }
  std::size_t rows() const { return ids_.size(); }
  const std::vector<std::string>& patient_ids() const { return ids_; }
  const std::string& patient_id(std::size_t row) const { return ids_[row]; }
  const std::vector<std::string>& provenance() const { return provenance_; }

  std::span<const double> column(std::size_t feature) const { return columns_[feature]; }
  std::span<const double> column(std::string_view name) const {
    return columns_[schema_.index_of(name)];
  }
  double value(std::size_t row, std::size_t feature) const { return columns_[feature][row]; }

  // Preconditions: analysis-ready table (see require_analysis_ready).
  int admission_day(std::size_t row) const {
    return static_cast<int>(columns_[schema_.day_index()][row]);
  }
  int outcome(std::size_t row) const {
    return static_cast<int>(columns_[schema_.outcome_index()][row]);
  }

  PatientRecord record(std::size_t row) const;

  double missing_rate(std::string_view name) const;
  std::map<std::string, double> missingness() const;

  // Throws DataError if admission day or outcome is missing on any row.
  void require_analysis_ready() const;

  CohortTable select_rows(std::span<const std::size_t> rows, std::string provenance_entry) const;
  CohortTable with_column(FeatureSpec spec, std::vector<double> values) const;
  CohortTable with_schema(FeatureSchema schema) const;
  CohortTable with_provenance(std::string entry) const;
  // Replaces one column's values (same length); used for transforms.
  CohortTable with_values(std::string_view name, std::vector<double> values,
                          std::string provenance_entry) const;

 private:
  FeatureSchema schema_;
  std::vector<std::string> ids_;
  std::vector<std::vector<double>> columns_;
  std::vector<std::string> provenance_;
};

// Reads a cohort CSV. Header names must match the schema (any order), plus
// the schema's id column when it declares one. Empty cells are missing.
CohortTable load_cohort(std::istream& source, const FeatureSchema& schema,
                        std::string source_name = "csv");
void write_cohort(std::ostream& out, const CohortTable& table);

struct ExclusionConfig {
  std::vector<std::string> pregnancy_indicator_features;
  std::vector<std::string> surgery_indicator_features;
  std::vector<std::string> required_features;
  double min_survival_hours = 6.0;
  std::optional<std::string> hours_to_death_feature;
};

ExclusionConfig exclusion_config_from_json(const nlohmann::json& j);

struct ExclusionRuleCount {
  std::string rule;
  std::size_t removed = 0;
  bool skipped = false;
};

struct ExclusionReport {
  std::size_t input_rows = 0;
  std::vector<ExclusionRuleCount> rules;  // application order
  std::size_t retained = 0;
  std::vector<std::string> warnings;

  std::size_t removed() const;
};

nlohmann::json to_json(const ExclusionReport& report);

struct ExclusionResult {
  CohortTable table;
  ExclusionReport report;
};

// Applies pregnancy, surgery, required-field and early-death rules in that
// order. Each count is taken against the rows left by the earlier rules.
ExclusionResult apply_exclusions(const CohortTable& table, const ExclusionConfig& cfg);

enum class RuleDirection { greater_than, less_than };
std::string_view to_string(RuleDirection d);
RuleDirection parse_rule_direction(std::string_view text);

struct BinarizationRule {
  std::string feature;
  RuleDirection direction = RuleDirection::greater_than;
  double threshold = 0.0;
  std::string derived_name;

  // 1 iff the strict comparison holds; missing stays missing.
  double apply(double value) const;
  std::string describe() const;
};

std::vector<BinarizationRule> rules_from_json(const nlohmann::json& j);
nlohmann::json rules_to_json(const std::vector<BinarizationRule>& rules);

// Adds one binary column per rule. Source columns stay in the table but are
// marked as not model inputs. Derived features inherit the source's role and
// group.
CohortTable apply_binarization(const CohortTable& table, const std::vector<BinarizationRule>& rules);

}  // namespace tvgam
