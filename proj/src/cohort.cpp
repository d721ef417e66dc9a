#include "tvgam/cohort.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "tvgam/csv.hpp"
#include "tvgam/error.hpp"

namespace tvgam {

namespace {

constexpr std::pair<FeatureKind, std::string_view> kKindNames[] = {
    {FeatureKind::continuous, "continuous"},
    {FeatureKind::binary, "binary"},
    {FeatureKind::categorical, "categorical"},
};

constexpr std::pair<FeatureRole, std::string_view> kRoleNames[] = {
    {FeatureRole::demographic, "demographic"},
    {FeatureRole::comorbidity, "comorbidity"},
    {FeatureRole::outpatient_med, "outpatient_med"},
    {FeatureRole::vital, "vital"},
    {FeatureRole::lab, "lab"},
    {FeatureRole::admission_day, "admission_day"},
    {FeatureRole::outcome, "outcome"},
    {FeatureRole::auxiliary, "auxiliary"},
};

// Strict numeric parse: the whole cell must be consumed and finite.
std::optional<double> parse_number(std::string_view cell) {
  while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
  while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::string where(std::size_t row, std::string_view column) {
  return "row " + std::to_string(row + 1) + " (line " + std::to_string(row + 2) + "), column '" +
         std::string(column) + "'";
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
  for (auto [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::string_view to_string(FeatureRole role) {
  for (auto [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "?";
}

FeatureKind parse_feature_kind(std::string_view text) {
  for (auto [k, name] : kKindNames) {
    if (name == text) return k;
  }
  throw DataError("unknown feature kind '" + std::string(text) + "'");
}

FeatureRole parse_feature_role(std::string_view text) {
  for (auto [r, name] : kRoleNames) {
    if (name == text) return r;
  }
  throw DataError("unknown feature role '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// FeatureSchema

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features, std::string id_column)
    : features_(std::move(features)), id_column_(std::move(id_column)) {
  validate();
}

void FeatureSchema::validate() {
  std::set<std::string_view> names;
  std::size_t days = 0;
  std::size_t outcomes = 0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& f = features_[i];
    if (f.name.empty()) throw DataError("feature with empty name in schema");
    if (f.name == id_column_) {
      throw DataError("feature '" + f.name + "' collides with the id column");
    }
    if (!names.insert(f.name).second) throw DataError("duplicate feature name '" + f.name + "'");
    if (f.role == FeatureRole::admission_day) {
      ++days;
      day_index_ = i;
    }
    if (f.role == FeatureRole::outcome) {
      ++outcomes;
      outcome_index_ = i;
      if (f.kind != FeatureKind::binary) throw DataError("outcome feature must be binary");
    }
  }
  if (days != 1) throw DataError("schema needs exactly one admission_day feature");
  if (outcomes != 1) throw DataError("schema needs exactly one outcome feature");
}

std::optional<std::size_t> FeatureSchema::find(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t FeatureSchema::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw DataError("unknown feature '" + std::string(name) + "'");
}

std::vector<std::string> FeatureSchema::modeled_features() const {
  std::vector<std::string> out;
  for (const auto& f : features_) {
    if (!f.model_input || f.role == FeatureRole::outcome || f.role == FeatureRole::auxiliary) {
      continue;
    }
    out.push_back(f.name);
  }
  return out;
}

void FeatureSchema::add(FeatureSpec spec) {
  features_.push_back(std::move(spec));
  try {
    validate();
  } catch (...) {
    features_.pop_back();
    throw;
  }
}

void FeatureSchema::set_model_input(std::string_view name, bool value) {
  features_[index_of(name)].model_input = value;
}

FeatureSchema schema_from_json(const nlohmann::json& j) {
  try {
    std::vector<FeatureSpec> specs;
    for (const auto& item : j.at("features")) {
      FeatureSpec s;
      s.name = item.at("name").get<std::string>();
      s.kind = parse_feature_kind(item.at("kind").get<std::string>());
      s.unit = item.value("unit", "");
      s.role = parse_feature_role(item.at("role").get<std::string>());
      s.model_input = item.value("model_input", true);
      s.group = item.value("group", "");
      s.rule = item.value("rule", "");
      specs.push_back(std::move(s));
    }
    std::string id_column = "patient_id";
    if (j.contains("id_column")) {
      id_column = j["id_column"].is_null() ? "" : j["id_column"].get<std::string>();
    }
    return FeatureSchema(std::move(specs), std::move(id_column));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid schema JSON: ") + e.what());
  }
}

nlohmann::json schema_to_json(const FeatureSchema& schema) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : schema.features()) {
    nlohmann::json item = {{"name", f.name},
                           {"kind", to_string(f.kind)},
                           {"unit", f.unit},
                           {"role", to_string(f.role)}};
    if (!f.model_input) item["model_input"] = false;
    if (!f.group.empty()) item["group"] = f.group;
    if (!f.rule.empty()) item["rule"] = f.rule;
    features.push_back(std::move(item));
  }
  nlohmann::json j = {{"features", std::move(features)}};
  if (schema.id_column().empty()) {
    j["id_column"] = nullptr;
  } else {
    j["id_column"] = schema.id_column();
  }
  return j;
}

// ---------------------------------------------------------------------------
// CohortTable

CohortTable::CohortTable(FeatureSchema schema, std::vector<std::string> patient_ids,
                         std::vector<std::vector<double>> columns,
                         std::vector<std::string> provenance)
    : schema_(std::move(schema)),
      ids_(std::move(patient_ids)),
      columns_(std::move(columns)),
      provenance_(std::move(provenance)) {
  if (columns_.size() != schema_.size()) {
    throw DataError("column count does not match schema");
  }
  for (const auto& c : columns_) {
    if (c.size() != ids_.size()) throw DataError("ragged cohort columns");
  }
}

PatientRecord CohortTable::record(std::size_t row) const {
  PatientRecord r;
  r.patient_id = ids_[row];
  const double day = columns_[schema_.day_index()][row];
  const double death = columns_[schema_.outcome_index()][row];
  r.admission_day = is_missing(day) ? -1 : static_cast<int>(day);
  r.outcome_death = is_missing(death) ? -1 : static_cast<int>(death);
  for (std::size_t f = 0; f < schema_.size(); ++f) {
    const double v = columns_[f][row];
    r.values.emplace(schema_.feature(f).name,
                     is_missing(v) ? std::nullopt : std::optional<double>(v));
  }
  return r;
}

double CohortTable::missing_rate(std::string_view name) const {
  if (rows() == 0) return 0.0;
  const auto col = column(name);
  const auto n = std::count_if(col.begin(), col.end(), [](double v) { return is_missing(v); });
  return static_cast<double>(n) / static_cast<double>(rows());
}

std::map<std::string, double> CohortTable::missingness() const {
  std::map<std::string, double> out;
  for (const auto& f : schema_.features()) out[f.name] = missing_rate(f.name);
  return out;
}

void CohortTable::require_analysis_ready() const {
  const auto day = columns_[schema_.day_index()];
  const auto death = columns_[schema_.outcome_index()];
  for (std::size_t r = 0; r < rows(); ++r) {
    if (is_missing(day[r])) {
      throw DataError("admission day missing for patient '" + ids_[r] + "'");
    }
    if (is_missing(death[r])) {
      throw DataError("outcome missing for patient '" + ids_[r] + "'");
    }
  }
}

CohortTable CohortTable::select_rows(std::span<const std::size_t> rows,
                                     std::string provenance_entry) const {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (auto r : rows) ids.push_back(ids_[r]);
  std::vector<std::vector<double>> cols(columns_.size());
  for (std::size_t f = 0; f < columns_.size(); ++f) {
    cols[f].reserve(rows.size());
    for (auto r : rows) cols[f].push_back(columns_[f][r]);
  }
  auto prov = provenance_;
  if (!provenance_entry.empty()) prov.push_back(std::move(provenance_entry));
  return CohortTable(schema_, std::move(ids), std::move(cols), std::move(prov));
}

CohortTable CohortTable::with_column(FeatureSpec spec, std::vector<double> values) const {
  FeatureSchema schema = schema_;
  schema.add(std::move(spec));
  auto cols = columns_;
  cols.push_back(std::move(values));
  return CohortTable(std::move(schema), ids_, std::move(cols), provenance_);
}

CohortTable CohortTable::with_schema(FeatureSchema schema) const {
  return CohortTable(std::move(schema), ids_, columns_, provenance_);
}

CohortTable CohortTable::with_provenance(std::string entry) const {
  CohortTable out = *this;
  out.provenance_.push_back(std::move(entry));
  return out;
}

CohortTable CohortTable::with_values(std::string_view name, std::vector<double> values,
                                     std::string provenance_entry) const {
  auto cols = columns_;
  cols[schema_.index_of(name)] = std::move(values);
  auto prov = provenance_;
  prov.push_back(std::move(provenance_entry));
  return CohortTable(schema_, ids_, std::move(cols), std::move(prov));
}

// ---------------------------------------------------------------------------
// CSV I/O

CohortTable load_cohort(std::istream& source, const FeatureSchema& schema,
                        std::string source_name) {
  const auto rows = csv::parse(source);
  if (rows.empty()) throw DataError("CSV has no header row");
  const auto& header = rows.front();

  std::vector<std::optional<std::size_t>> column_feature(header.size());
  std::optional<std::size_t> id_col;
  std::vector<bool> seen(schema.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& name = header[c];
    if (!schema.id_column().empty() && name == schema.id_column()) {
      if (id_col) throw DataError("duplicate column '" + name + "' in header");
      id_col = c;
      continue;
    }
    auto f = schema.find(name);
    if (!f) throw DataError("unknown column '" + name + "' in header");
    if (seen[*f]) throw DataError("duplicate column '" + name + "' in header");
    seen[*f] = true;
    column_feature[c] = f;
  }
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (!seen[f]) throw DataError("missing column '" + schema.feature(f).name + "' in header");
  }
  if (!schema.id_column().empty() && !id_col) {
    throw DataError("missing id column '" + schema.id_column() + "' in header");
  }

  const std::size_t n = rows.size() - 1;
  std::vector<std::string> ids;
  ids.reserve(n);
  std::vector<std::vector<double>> cols(schema.size());
  for (auto& c : cols) c.reserve(n);

  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = rows[r + 1];
    if (row.size() != header.size()) {
      throw DataError("malformed CSV: row " + std::to_string(r + 1) + " (line " +
                      std::to_string(r + 2) + ") has " + std::to_string(row.size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
    ids.push_back(id_col ? row[*id_col] : std::to_string(r + 1));
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (!column_feature[c]) continue;
      const std::size_t f = *column_feature[c];
      const auto& spec = schema.feature(f);
      const auto& cell = row[c];
      if (cell.empty()) {
        cols[f].push_back(kMissing);
        continue;
      }
      auto v = parse_number(cell);
      if (!v) throw DataError("non-numeric value '" + cell + "' at " + where(r, spec.name));
      if (spec.kind == FeatureKind::binary && *v != 0.0 && *v != 1.0) {
        throw DataError("value '" + cell + "' outside {0,1} at " + where(r, spec.name));
      }
      if (spec.role == FeatureRole::admission_day && (*v < 0.0 || *v != std::floor(*v))) {
        throw DataError("admission day must be a non-negative integer at " + where(r, spec.name));
      }
      cols[f].push_back(*v);
    }
  }
  return CohortTable(schema, std::move(ids), std::move(cols), {"load:" + source_name});
}

void write_cohort(std::ostream& out, const CohortTable& table) {
  const auto& schema = table.schema();
  csv::Row header;
  if (!schema.id_column().empty()) header.push_back(schema.id_column());
  for (const auto& f : schema.features()) header.push_back(f.name);
  csv::write_row(out, header);
  csv::Row row;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    row.clear();
    if (!schema.id_column().empty()) row.push_back(table.patient_id(r));
    for (std::size_t f = 0; f < schema.size(); ++f) {
      const double v = table.value(r, f);
      row.push_back(is_missing(v) ? std::string() : csv::format_double(v));
    }
    csv::write_row(out, row);
  }
}

// ---------------------------------------------------------------------------
// Exclusions

ExclusionConfig exclusion_config_from_json(const nlohmann::json& j) {
  try {
    ExclusionConfig cfg;
    cfg.pregnancy_indicator_features =
        j.value("pregnancy_indicator_features", std::vector<std::string>{});
    cfg.surgery_indicator_features =
        j.value("surgery_indicator_features", std::vector<std::string>{});
    cfg.required_features = j.value("required_features", std::vector<std::string>{});
    cfg.min_survival_hours = j.value("min_survival_hours", 6.0);
    if (j.contains("hours_to_death_feature") && !j["hours_to_death_feature"].is_null()) {
      cfg.hours_to_death_feature = j["hours_to_death_feature"].get<std::string>();
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid exclusion config JSON: ") + e.what());
  }
}

std::size_t ExclusionReport::removed() const {
  std::size_t total = 0;
  for (const auto& r : rules) total += r.removed;
  return total;
}

nlohmann::json to_json(const ExclusionReport& report) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : report.rules) {
    rules.push_back({{"rule", r.rule}, {"removed", r.removed}, {"skipped", r.skipped}});
  }
  return {{"input_rows", report.input_rows},
          {"rules", std::move(rules)},
          {"removed", report.removed()},
          {"retained", report.retained},
          {"warnings", report.warnings}};
}

ExclusionResult apply_exclusions(const CohortTable& table, const ExclusionConfig& cfg) {
  const auto& schema = table.schema();
  auto resolve = [&](const std::vector<std::string>& names) {
    std::vector<std::size_t> idx;
    for (const auto& name : names) {
      auto f = schema.find(name);
      if (!f) throw DataError("exclusion config references unknown feature '" + name + "'");
      idx.push_back(*f);
    }
    return idx;
  };
  const auto pregnancy = resolve(cfg.pregnancy_indicator_features);
  const auto surgery = resolve(cfg.surgery_indicator_features);
  const auto required = resolve(cfg.required_features);

  ExclusionReport report;
  report.input_rows = table.rows();

  std::optional<std::size_t> hours_col;
  if (!cfg.hours_to_death_feature) {
    report.warnings.push_back("early-death rule skipped: no hours_to_death_feature configured");
  } else if (auto f = schema.find(*cfg.hours_to_death_feature)) {
    hours_col = f;
  } else {
    report.warnings.push_back("early-death rule skipped: column '" + *cfg.hours_to_death_feature +
                              "' not present in the cohort");
  }

  std::vector<std::size_t> alive(table.rows());
  for (std::size_t r = 0; r < alive.size(); ++r) alive[r] = r;

  auto run_rule = [&](std::string name, bool skipped, auto&& excluded) {
    ExclusionRuleCount count{std::move(name), 0, skipped};
    if (!skipped) {
      std::vector<std::size_t> kept;
      kept.reserve(alive.size());
      for (auto r : alive) {
        if (excluded(r)) {
          ++count.removed;
        } else {
          kept.push_back(r);
        }
      }
      alive = std::move(kept);
    }
    report.rules.push_back(std::move(count));
  };

  auto any_flag = [&](const std::vector<std::size_t>& cols) {
    return [&table, &cols](std::size_t r) {
      return std::any_of(cols.begin(), cols.end(),
                         [&](std::size_t f) { return table.value(r, f) == 1.0; });
    };
  };

  run_rule("pregnancy", false, any_flag(pregnancy));
  run_rule("scheduled_surgery", false, any_flag(surgery));
  run_rule("required_features", false, [&](std::size_t r) {
    return std::any_of(required.begin(), required.end(),
                       [&](std::size_t f) { return is_missing(table.value(r, f)); });
  });
  run_rule("early_death", !hours_col, [&](std::size_t r) {
    const double h = table.value(r, *hours_col);
    return !is_missing(h) && h < cfg.min_survival_hours;
  });

  report.retained = alive.size();
  return {table.select_rows(alive, "exclusions"), std::move(report)};
}

// ---------------------------------------------------------------------------
// Binarization

std::string_view to_string(RuleDirection d) {
  return d == RuleDirection::greater_than ? "greater_than" : "less_than";
}

RuleDirection parse_rule_direction(std::string_view text) {
  if (text == "greater_than" || text == ">") return RuleDirection::greater_than;
  if (text == "less_than" || text == "<") return RuleDirection::less_than;
  throw DataError("unknown rule direction '" + std::string(text) + "'");
}

double BinarizationRule::apply(double value) const {
  if (is_missing(value)) return kMissing;
  const bool hit = direction == RuleDirection::greater_than ? value > threshold : value < threshold;
  return hit ? 1.0 : 0.0;
}

std::string BinarizationRule::describe() const {
  return std::string(direction == RuleDirection::greater_than ? "> " : "< ") +
         csv::format_double(threshold);
}

std::vector<BinarizationRule> rules_from_json(const nlohmann::json& j) {
  try {
    const auto& list = j.is_object() ? j.at("rules") : j;
    std::vector<BinarizationRule> rules;
    for (const auto& item : list) {
      BinarizationRule r;
      r.feature = item.at("feature").get<std::string>();
      r.direction = parse_rule_direction(item.at("direction").get<std::string>());
      r.threshold = item.at("threshold").get<double>();
      r.derived_name = item.value("derived_name", r.feature + "_high");
      if (!std::isfinite(r.threshold)) throw DataError("non-finite threshold for " + r.feature);
      rules.push_back(std::move(r));
    }
    return rules;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid rules JSON: ") + e.what());
  }
}

nlohmann::json rules_to_json(const std::vector<BinarizationRule>& rules) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : rules) {
    list.push_back({{"feature", r.feature},
                    {"direction", to_string(r.direction)},
                    {"threshold", r.threshold},
                    {"derived_name", r.derived_name}});
  }
  return {{"rules", std::move(list)}};
}

CohortTable apply_binarization(const CohortTable& table,
                               const std::vector<BinarizationRule>& rules) {
  std::set<std::string> derived;
  for (const auto& r : rules) {
    if (!derived.insert(r.derived_name).second) {
      throw DataError("duplicate derived feature name '" + r.derived_name + "'");
    }
    if (table.schema().find(r.derived_name)) {
      throw DataError("derived feature '" + r.derived_name + "' already exists in the cohort");
    }
    const auto& spec = table.schema().feature(r.feature);
    if (spec.kind != FeatureKind::continuous) {
      throw DataError("binarization source '" + r.feature + "' is not continuous");
    }
    if (!std::isfinite(r.threshold)) throw DataError("non-finite threshold for " + r.feature);
  }

  CohortTable out = table;
  for (const auto& r : rules) {
    const auto& source = table.schema().feature(r.feature);
    const auto col = table.column(r.feature);
    std::vector<double> values(col.size());
    std::transform(col.begin(), col.end(), values.begin(),
                   [&](double v) { return r.apply(v); });
    FeatureSpec spec;
    spec.name = r.derived_name;
    spec.kind = FeatureKind::binary;
    spec.role = source.role;
    spec.group = source.group;
    spec.rule = r.describe() + (source.unit.empty() ? "" : " " + source.unit);
    out = out.with_column(std::move(spec), std::move(values));
  }
  auto schema = out.schema();
  for (const auto& r : rules) schema.set_model_input(r.feature, false);
  out = out.with_schema(std::move(schema));
  for (const auto& r : rules) {
    out = out.with_provenance("binarize:" + r.derived_name + "=" + r.feature + " " + r.describe());
  }
  return out;
}

}  // namespace tvgam
