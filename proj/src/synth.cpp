#include "tvgam/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tvgam/csv.hpp"
#include "tvgam/error.hpp"
#include "tvgam/logistic.hpp"
#include "tvgam/rng.hpp"

namespace tvgam {

namespace {

constexpr std::uint64_t kRowStream = 0x5EED;
constexpr std::size_t kChunkRows = 4096;

PiecewiseLinear pl_from_json(const nlohmann::json& j) {
  if (j.is_number()) return PiecewiseLinear::constant(j.get<double>());
  return {j.at("x").get<std::vector<double>>(), j.at("y").get<std::vector<double>>()};
}

nlohmann::json pl_to_json(const PiecewiseLinear& p) { return {{"x", p.x}, {"y", p.y}}; }

std::string_view distribution_name(Distribution d) {
  switch (d) {
    case Distribution::normal:
      return "normal";
    case Distribution::lognormal:
      return "lognormal";
    case Distribution::bernoulli:
      return "bernoulli";
  }
  return "?";
}

Distribution parse_distribution(std::string_view s) {
  if (s == "normal") return Distribution::normal;
  if (s == "lognormal") return Distribution::lognormal;
  if (s == "bernoulli") return Distribution::bernoulli;
  throw DataError("unknown distribution '" + std::string(s) + "'");
}

double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

double sample_value(const FeatureTruth& f, Rng& rng) {
  switch (f.distribution) {
    case Distribution::bernoulli:
      return rng.bernoulli(f.a) ? 1.0 : 0.0;
    case Distribution::normal:
    case Distribution::lognormal: {
      double v = f.a + f.b * rng.normal();
      if (f.distribution == Distribution::lognormal) v = std::exp(v);
      if (f.min) v = std::max(v, *f.min);
      if (f.max) v = std::min(v, *f.max);
      return round_to(v, f.decimals);
    }
  }
  return 0.0;
}

int sample_day(const std::vector<DaySegment>& segments, double total_weight, Rng& rng) {
  double u = rng.uniform() * total_weight;
  const DaySegment* pick = &segments.back();
  for (const auto& s : segments) {
    if (u < s.weight) {
      pick = &s;
      break;
    }
    u -= s.weight;
  }
  return pick->lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(pick->hi - pick->lo)));
}

PiecewiseLinear step(double day, double before, double after) {
  return {{0.0, day, day, 600.0}, {before, before, after, after}};
}

PiecewiseLinear linear(double y0, double y1) { return {{0.0, 530.0}, {y0, y1}}; }

FeatureTruth binary(std::string name, FeatureRole role, double p, double effect) {
  FeatureTruth f;
  f.name = std::move(name);
  f.kind = FeatureKind::binary;
  f.role = role;
  f.distribution = Distribution::bernoulli;
  f.a = p;
  f.static_effect = {{0.0, 1.0}, {0.0, effect}};
  return f;
}

FeatureTruth lab(std::string name, std::string group, std::string rule, double p,
                 double missing) {
  FeatureTruth f = binary(std::move(name), FeatureRole::lab, p, 0.0);
  f.group = std::move(group);
  f.rule = std::move(rule);
  f.missing_rate = missing;
  return f;
}

FeatureTruth continuous(std::string name, FeatureRole role, std::string unit, double mean,
                        double sd, double lo, double hi, int decimals, PiecewiseLinear effect) {
  FeatureTruth f;
  f.name = std::move(name);
  f.role = role;
  f.unit = std::move(unit);
  f.a = mean;
  f.b = sd;
  f.min = lo;
  f.max = hi;
  f.decimals = decimals;
  f.static_effect = std::move(effect);
  return f;
}

RecoveryEntry compare(const EffectSeries& series, const std::vector<double>& truth) {
  RecoveryEntry e;
  e.subject = series.subject;
  const auto& pts = series.points;
  std::size_t covered = 0;
  double best_fit = -1.0;
  double best_true = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double fitted = std::log(pts[i].odds_ratio);
    e.max_abs_error = std::max(e.max_abs_error, std::abs(fitted - truth[i]));
    if (std::log(pts[i].lower95) <= truth[i] + 1e-12 &&
        truth[i] - 1e-12 <= std::log(pts[i].upper95)) {
      ++covered;
    }
    if (i == 0) continue;
    const double d_fit = std::abs(fitted - std::log(pts[i - 1].odds_ratio));
    const double d_true = std::abs(truth[i] - truth[i - 1]);
    if (d_fit > best_fit) {
      best_fit = d_fit;
      e.estimated_changepoint = pts[i].day;
    }
    if (d_true > best_true) {
      best_true = d_true;
      e.true_changepoint = pts[i].day;
    }
  }
  e.max_successive_diff = std::max(0.0, best_fit);
  e.true_max_successive_diff = std::max(0.0, best_true);
  e.coverage = pts.empty() ? 0.0 : static_cast<double>(covered) / static_cast<double>(pts.size());
  if (pts.size() == 1) e.estimated_changepoint = e.true_changepoint = pts[0].day;
  return e;
}

}  // namespace

double PiecewiseLinear::operator()(double v) const {
  if (x.size() == 1 || v < x.front()) return y.front();
  if (v >= x.back()) return y.back();
  // Last knot with x <= v, so a repeated knot yields its right-hand value.
  const auto hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), v) - x.begin());
  const std::size_t lo = hi - 1;
  if (x[lo] == v) return y[lo];
  const double t = (v - x[lo]) / (x[hi] - x[lo]);
  return y[lo] + t * (y[hi] - y[lo]);
}

bool PiecewiseLinear::is_constant() const {
  return std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
}

void PiecewiseLinear::validate(std::string_view what) const {
  if (x.empty() || x.size() != y.size()) {
    throw DataError(std::string(what) + ": knots must be non-empty with matching x and y");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw DataError(std::string(what) + ": non-finite knot");
    }
    if (i > 0 && x[i] < x[i - 1]) throw DataError(std::string(what) + ": knots out of order");
    if (i > 1 && x[i] == x[i - 2]) {
      throw DataError(std::string(what) + ": a knot may repeat at most once");
    }
  }
}

double FeatureTruth::contribution(double value, double day) const {
  double s = static_effect(value);
  if (time_effect) s += (*time_effect)(day) * (time_value ? (*time_value)(value) : value);
  return s;
}

void GroundTruth::validate() const {
  if (!std::isfinite(intercept)) throw DataError("truth intercept must be finite");
  if (day_segments.empty()) throw DataError("truth needs at least one day segment");
  double total = 0.0;
  for (const auto& s : day_segments) {
    if (s.lo < 0 || s.hi <= s.lo) throw DataError("day segment must satisfy 0 <= lo < hi");
    if (!(s.weight >= 0.0) || !std::isfinite(s.weight)) {
      throw DataError("day segment weight must be finite and non-negative");
    }
    total += s.weight;
  }
  if (!(total > 0.0)) throw DataError("day segment weights sum to zero");
  day_effect.validate("day_effect");
  if (!std::isfinite(hours_mu) || !(hours_sigma >= 0.0)) {
    throw DataError("invalid hours-to-death parameters");
  }
  for (const auto& f : features) {
    f.static_effect.validate(f.name + " static_effect");
    if (f.time_effect) f.time_effect->validate(f.name + " time_effect");
    if (f.time_value) f.time_value->validate(f.name + " time_value");
    if (!(f.missing_rate >= 0.0 && f.missing_rate <= 1.0)) {
      throw DataError(f.name + ": missing_rate must be in [0, 1]");
    }
    switch (f.distribution) {
      case Distribution::bernoulli:
        if (!(f.a >= 0.0 && f.a <= 1.0)) throw DataError(f.name + ": p must be in [0, 1]");
        if (f.kind != FeatureKind::binary) {
          throw DataError(f.name + ": bernoulli features must be binary");
        }
        break;
      case Distribution::normal:
      case Distribution::lognormal:
        if (!std::isfinite(f.a) || !(f.b >= 0.0) || !std::isfinite(f.b)) {
          throw DataError(f.name + ": invalid location/scale");
        }
        if (f.kind == FeatureKind::binary) throw DataError(f.name + ": binary needs bernoulli");
        if (f.min && f.max && *f.min > *f.max) throw DataError(f.name + ": min exceeds max");
        if (f.decimals < 0 || f.decimals > 12) throw DataError(f.name + ": decimals out of range");
        break;
    }
  }
  schema();  // name uniqueness and role checks
}

const FeatureTruth& GroundTruth::feature(std::string_view name) const {
  for (const auto& f : features) {
    if (f.name == name) return f;
  }
  throw DataError("feature '" + std::string(name) + "' is not in the ground truth");
}

FeatureSchema GroundTruth::schema() const {
  std::vector<FeatureSpec> specs;
  specs.push_back({day_feature, FeatureKind::continuous, "days", FeatureRole::admission_day, true,
                   "", ""});
  specs.push_back({outcome, FeatureKind::binary, "", FeatureRole::outcome, true, "", ""});
  for (const auto& f : features) {
    specs.push_back({f.name, f.kind, f.unit, f.role, f.model_input, f.group, f.rule});
  }
  if (hours_to_death_feature) {
    specs.push_back({*hours_to_death_feature, FeatureKind::continuous, "hours",
                     FeatureRole::auxiliary, false, "", ""});
  }
  return FeatureSchema(std::move(specs), id_column);
}

double GroundTruth::logit(std::span<const double> values, double day) const {
  double z = intercept + day_effect(day);
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].model_input) z += features[i].contribution(values[i], day);
  }
  return z;
}

double GroundTruth::log_or(std::string_view name, double day) const {
  const auto& f = feature(name);
  if (f.kind != FeatureKind::binary) {
    throw DataError("feature '" + std::string(name) + "' is not binary");
  }
  return f.contribution(1.0, day) - f.contribution(0.0, day);
}

int GroundTruth::max_day() const {
  int hi = 0;
  for (const auto& s : day_segments) {
    if (s.weight > 0.0) hi = std::max(hi, s.hi - 1);
  }
  return hi;
}

GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  try {
    GroundTruth t;
    t.intercept = j.at("intercept").get<double>();
    t.id_column = j.value("id_column", t.id_column);
    t.day_feature = j.value("day_feature", t.day_feature);
    t.outcome = j.value("outcome", t.outcome);
    t.day_segments.clear();
    for (const auto& s : j.at("day_segments")) {
      t.day_segments.push_back(
          {s.at("lo").get<int>(), s.at("hi").get<int>(), s.value("weight", 1.0)});
    }
    if (j.contains("day_effect")) t.day_effect = pl_from_json(j["day_effect"]);
    if (j.contains("hours_to_death")) {
      const auto& h = j["hours_to_death"];
      t.hours_to_death_feature = h.at("name").get<std::string>();
      t.hours_mu = h.at("mu").get<double>();
      t.hours_sigma = h.at("sigma").get<double>();
    }
    for (const auto& item : j.at("features")) {
      FeatureTruth f;
      f.name = item.at("name").get<std::string>();
      f.kind = parse_feature_kind(item.at("kind").get<std::string>());
      f.role = parse_feature_role(item.at("role").get<std::string>());
      f.unit = item.value("unit", "");
      f.group = item.value("group", "");
      f.rule = item.value("rule", "");
      f.model_input = item.value("model_input", true);
      const auto& d = item.at("distribution");
      f.distribution = parse_distribution(d.at("type").get<std::string>());
      if (f.distribution == Distribution::bernoulli) {
        f.a = d.at("p").get<double>();
      } else {
        const bool log = f.distribution == Distribution::lognormal;
        f.a = d.at(log ? "mu" : "mean").get<double>();
        f.b = d.at(log ? "sigma" : "sd").get<double>();
        if (d.contains("min")) f.min = d["min"].get<double>();
        if (d.contains("max")) f.max = d["max"].get<double>();
        f.decimals = d.value("decimals", f.decimals);
      }
      f.missing_rate = item.value("missing_rate", 0.0);
      if (item.contains("static_effect")) f.static_effect = pl_from_json(item["static_effect"]);
      if (item.contains("time_effect")) {
        const auto& te = item["time_effect"];
        f.time_effect = pl_from_json(te.at("day"));
        if (te.contains("value")) f.time_value = pl_from_json(te["value"]);
      }
      t.features.push_back(std::move(f));
    }
    t.validate();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid ground truth JSON: ") + e.what());
  }
}

nlohmann::json to_json(const GroundTruth& t) {
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& s : t.day_segments) {
    segments.push_back({{"lo", s.lo}, {"hi", s.hi}, {"weight", s.weight}});
  }
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : t.features) {
    nlohmann::json d = {{"type", distribution_name(f.distribution)}};
    if (f.distribution == Distribution::bernoulli) {
      d["p"] = f.a;
    } else {
      const bool log = f.distribution == Distribution::lognormal;
      d[log ? "mu" : "mean"] = f.a;
      d[log ? "sigma" : "sd"] = f.b;
      if (f.min) d["min"] = *f.min;
      if (f.max) d["max"] = *f.max;
      d["decimals"] = f.decimals;
    }
    nlohmann::json item = {{"name", f.name},
                           {"kind", to_string(f.kind)},
                           {"role", to_string(f.role)},
                           {"unit", f.unit},
                           {"distribution", std::move(d)},
                           {"missing_rate", f.missing_rate},
                           {"static_effect", pl_to_json(f.static_effect)}};
    if (!f.group.empty()) item["group"] = f.group;
    if (!f.rule.empty()) item["rule"] = f.rule;
    if (!f.model_input) item["model_input"] = false;
    if (f.time_effect) {
      item["time_effect"] = {{"day", pl_to_json(*f.time_effect)}};
      if (f.time_value) item["time_effect"]["value"] = pl_to_json(*f.time_value);
    }
    features.push_back(std::move(item));
  }
  nlohmann::json j = {{"intercept", t.intercept},
                      {"id_column", t.id_column},
                      {"day_feature", t.day_feature},
                      {"outcome", t.outcome},
                      {"day_segments", std::move(segments)},
                      {"day_effect", pl_to_json(t.day_effect)},
                      {"features", std::move(features)}};
  if (t.hours_to_death_feature) {
    j["hours_to_death"] = {
        {"name", *t.hours_to_death_feature}, {"mu", t.hours_mu}, {"sigma", t.hours_sigma}};
  }
  return j;
}

GroundTruth nyc_like_truth() {
  GroundTruth t;
  t.intercept = -4.5;
  t.day_segments = {{0, 30, 0.15}, {30, 50, 0.35}, {50, 120, 0.15}, {120, 300, 0.15},
                    {300, 530, 0.20}};
  t.day_effect = {{0, 30, 50, 120, 300, 530}, {0.9, 0.8, 0.5, -0.1, -0.3, -0.4}};
  t.hours_to_death_feature = "hours_to_death";
  t.hours_mu = 4.5;
  t.hours_sigma = 1.2;

  auto& fs = t.features;
  fs.push_back(continuous("age", FeatureRole::demographic, "years", 62, 17, 18, 100, 0,
                          {{18, 40, 55, 65, 75, 85, 100}, {-1.6, -1.1, -0.4, 0.2, 0.8, 1.4, 1.8}}));
  fs.push_back(binary("sex_male", FeatureRole::demographic, 0.58, 0.25));
  fs.push_back(continuous("bmi", FeatureRole::demographic, "kg/m2", 29, 6, 14, 60, 1,
                          {{14, 18.5, 22, 25, 30, 35, 40, 60}, {1.8, 0.9, 0.1, 0.0, 0.0, 0.5, 1.1, 1.6}}));
  fs.push_back(continuous("temperature", FeatureRole::vital, "C", 37.6, 0.9, 35, 41, 1,
                          {{35, 36, 36.5, 38, 39, 41}, {1.2, 0.3, 0.0, 0.0, 0.8, 1.2}}));
  fs.push_back(continuous("heart_rate", FeatureRole::vital, "bpm", 92, 18, 40, 180, 0,
                          {{40, 60, 70, 100, 120, 140, 180}, {1.2, 0.3, 0.0, 0.0, 0.6, 1.2, 1.6}}));
  fs.push_back(continuous("mean_arterial_pressure", FeatureRole::vital, "mmHg", 88, 15, 40, 150, 0,
                          {{40, 60, 70, 80, 100, 120, 150}, {2.0, 1.0, 0.2, 0.0, 0.0, 0.4, 0.9}}));
  auto spo2 = continuous("oxygen_saturation", FeatureRole::vital, "%", 94, 4, 70, 100, 0,
                         {{70, 88, 92, 95, 100}, {1.8, 1.2, 0.3, 0.0, 0.0}});
  spo2.missing_rate = 0.02;
  fs.push_back(spo2);

  fs.push_back(binary("hypertension", FeatureRole::comorbidity, 0.55, 0.20));
  fs.push_back(binary("diabetes", FeatureRole::comorbidity, 0.35, 0.25));
  fs.push_back(binary("chronic_kidney_disease", FeatureRole::comorbidity, 0.12, 0.45));
  fs.push_back(binary("copd", FeatureRole::comorbidity, 0.08, 0.30));
  fs.push_back(binary("coronary_artery_disease", FeatureRole::comorbidity, 0.15, 0.20));
  fs.push_back(binary("outpatient_anticoagulant", FeatureRole::outpatient_med, 0.10, 0.10));
  fs.push_back(binary("outpatient_statin", FeatureRole::outpatient_med, 0.30, -0.10));
  fs.push_back(binary("outpatient_ace_inhibitor", FeatureRole::outpatient_med, 0.20, 0.0));
  auto prenatal = binary("outpatient_prenatal_vitamins", FeatureRole::outpatient_med, 0.004, 0.0);
  prenatal.model_input = false;
  fs.push_back(prenatal);
  auto surgery = binary("scheduled_surgery", FeatureRole::auxiliary, 0.01, 0.0);
  surgery.model_input = false;
  fs.push_back(surgery);

  auto add_lab = [&](FeatureTruth f, std::optional<PiecewiseLinear> time, double constant) {
    if (time) f.time_effect = std::move(time);
    f.static_effect = {{0.0, 1.0}, {0.0, constant}};
    fs.push_back(std::move(f));
  };
  add_lab(lab("d_dimer_high", "thrombosis", "> 1000 ng/mL", 0.50, 0.05), step(50, -0.3, 0.5), 0);
  add_lab(lab("hematocrit_high", "thrombosis", "> 45 %", 0.25, 0.01), step(50, -0.2, 0.4), 0);
  add_lab(lab("fibrinogen_high", "thrombosis", "> 700 mg/dL", 0.30, 0.10), step(50, 0.0, 0.4), 0);
  add_lab(lab("crp_high", "inflammation", "> 100 mg/L", 0.50, 0.03), linear(0.6, 0.1), 0);
  add_lab(lab("nlr_high", "inflammation", "> 6", 0.45, 0.02), linear(0.5, 0.1), 0);
  add_lab(lab("albumin_low", "inflammation", "< 3.5 g/dL", 0.35, 0.04), linear(0.5, 0.2), 0);
  add_lab(lab("il6_high", "inflammation", "> 40 pg/mL", 0.30, 0.30), linear(0.4, 0.1), 0);
  add_lab(lab("procalcitonin_high", "inflammation", "> 0.5 ng/mL", 0.20, 0.06), linear(0.5, 0.15),
          0);
  add_lab(lab("potassium_high", "other", "> 5 mmol/L", 0.10, 0.01), std::nullopt, 0.30);
  add_lab(lab("ferritin_high", "other", "> 1000 ng/mL", 0.45, 0.083), std::nullopt, 0.25);
  add_lab(lab("ldh_high", "other", "> 400 U/L", 0.40, 0.05), std::nullopt, 0.35);
  add_lab(lab("calcium_low", "other", "< 8.5 mg/dL", 0.20, 0.02), std::nullopt, 0.15);
  t.validate();
  return t;
}

CohortTable generate_cohort(const GroundTruth& truth, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw UsageError("cohort size must be at least 1");
  truth.validate();
  const FeatureSchema schema = truth.schema();
  const std::size_t nf = truth.features.size();
  double total_weight = 0.0;
  for (const auto& s : truth.day_segments) total_weight += s.weight;

  // Schema column order: day, outcome, features..., optional hours.
  std::vector<std::vector<double>> columns(schema.size(), std::vector<double>(n, kMissing));
  std::vector<std::string> ids(n);
  const std::size_t width = std::max<std::size_t>(6, std::to_string(n).size());
  std::vector<double> values(nf);
  for (std::size_t chunk = 0; chunk * kChunkRows < n; ++chunk) {
    Rng rng(derive_seed(seed, kRowStream, chunk));
    const std::size_t end = std::min(n, (chunk + 1) * kChunkRows);
    for (std::size_t r = chunk * kChunkRows; r < end; ++r) {
      const int day = sample_day(truth.day_segments, total_weight, rng);
      for (std::size_t i = 0; i < nf; ++i) values[i] = sample_value(truth.features[i], rng);
      const int dead = rng.bernoulli(sigmoid(truth.logit(values, day))) ? 1 : 0;
      columns[0][r] = day;
      columns[1][r] = dead;
      for (std::size_t i = 0; i < nf; ++i) {
        const bool drop = rng.bernoulli(truth.features[i].missing_rate);
        columns[2 + i][r] = drop ? kMissing : values[i];
      }
      if (truth.hours_to_death_feature) {
        const double hours = std::exp(truth.hours_mu + truth.hours_sigma * rng.normal());
        if (dead) columns[2 + nf][r] = round_to(hours, 1);
      }
      const auto number = std::to_string(r + 1);
      ids[r] = "P" + std::string(width - std::min(width, number.size()), '0') + number;
    }
  }
  return CohortTable(schema, std::move(ids), std::move(columns),
                     {"synthetic n=" + std::to_string(n) + " seed=" + std::to_string(seed)});
}

std::vector<BiomarkerGroup> truth_groups(const GroundTruth& truth) {
  std::vector<BiomarkerGroup> groups;
  for (const auto& f : truth.features) {
    if (f.group.empty() || f.kind != FeatureKind::binary) continue;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const BiomarkerGroup& g) { return g.name == f.group; });
    if (it == groups.end()) {
      groups.push_back({f.group, {}});
      it = groups.end() - 1;
    }
    it->members.push_back(f.name);
  }
  return groups;
}

void write_truth_curves(std::ostream& out, const GroundTruth& truth, const std::vector<int>& days) {
  csv::write_row(out, {"subject", "day", "log_or", "or"});
  auto emit = [&](const std::string& subject, auto&& log_or) {
    for (int d : days) {
      const double v = log_or(d);
      csv::write_row(out, {subject, std::to_string(d), csv::format_double(v),
                           csv::format_double(std::exp(v))});
    }
  };
  for (const auto& f : truth.features) {
    if (f.kind != FeatureKind::binary || !f.model_input) continue;
    if (!f.time_effect && f.static_effect(1.0) == f.static_effect(0.0)) continue;
    emit(f.name, [&](int d) { return truth.log_or(f.name, d); });
  }
  for (const auto& g : truth_groups(truth)) {
    emit(g.name, [&](int d) {
      double s = 0.0;
      for (const auto& m : g.members) s += truth.log_or(m, d);
      return s / static_cast<double>(g.members.size());
    });
  }
}

RecoveryEntry recovery_error(const EffectSeries& series, const GroundTruth& truth,
                             std::string_view feature) {
  return recovery_error(series, truth, BiomarkerGroup{std::string(feature), {std::string(feature)}});
}

RecoveryEntry recovery_error(const EffectSeries& series, const GroundTruth& truth,
                             const BiomarkerGroup& group) {
  if (group.members.empty()) throw DataError("group '" + group.name + "' is empty");
  const int hi = truth.max_day();
  std::vector<double> expected;
  for (const auto& p : series.points) {
    if (p.day < 0 || p.day > hi) {
      throw DataError("day " + std::to_string(p.day) + " is outside the truth's day support");
    }
    double s = 0.0;
    for (const auto& m : group.members) s += truth.log_or(m, p.day);
    expected.push_back(s / static_cast<double>(group.members.size()));
  }
  return compare(series, expected);
}

}  // namespace tvgam
