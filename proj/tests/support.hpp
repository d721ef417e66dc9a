#pragma once

// Shared fixtures: a small ground truth, cohorts drawn from it and a fast
// boosting configuration.

#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tvgam/baselines.hpp"
#include "tvgam/gam.hpp"
#include "tvgam/synth.hpp"

namespace tvgam::testing {

inline GroundTruth small_truth() {
  return ground_truth_from_json(nlohmann::json::parse(R"({
    "intercept": -1.3,
    "id_column": "patient_id",
    "day_feature": "admission_day",
    "outcome": "death",
    "day_segments": [{"lo": 0, "hi": 300, "weight": 1}],
    "day_effect": {"x": [0, 300], "y": [0.4, -0.4]},
    "features": [
      {"name": "age", "kind": "continuous", "role": "demographic", "unit": "years",
       "distribution": {"type": "normal", "mean": 60, "sd": 15, "min": 18, "max": 100,
                        "decimals": 0},
       "static_effect": {"x": [18, 60, 100], "y": [-1.0, 0.0, 1.0]}},
      {"name": "bmi", "kind": "continuous", "role": "demographic", "unit": "kg/m2",
       "missing_rate": 0.05,
       "distribution": {"type": "normal", "mean": 28, "sd": 5, "min": 15, "max": 50,
                        "decimals": 1},
       "static_effect": {"x": [15, 22, 30, 50], "y": [0.8, 0.0, 0.0, 0.9]}},
      {"name": "lab_step", "kind": "binary", "role": "lab", "group": "g1",
       "rule": "> 1", "distribution": {"type": "bernoulli", "p": 0.5},
       "static_effect": {"x": [0, 1], "y": [0, 0]},
       "time_effect": {"day": {"x": [0, 150, 150, 300], "y": [-0.4, -0.4, 0.6, 0.6]}}},
      {"name": "lab_const", "kind": "binary", "role": "lab", "group": "g1",
       "rule": "> 2", "distribution": {"type": "bernoulli", "p": 0.3},
       "static_effect": {"x": [0, 1], "y": [0, 0.5]}},
      {"name": "lab_null", "kind": "binary", "role": "lab", "group": "g2",
       "rule": "< 3", "missing_rate": 0.02, "distribution": {"type": "bernoulli", "p": 0.4},
       "static_effect": {"x": [0, 1], "y": [0, 0]}}
    ]})"));
}

inline CohortTable small_cohort(std::size_t n, std::uint64_t seed) {
  return generate_cohort(small_truth(), n, seed);
}

inline GamConfig fast_config(std::uint64_t seed = 1) {
  GamConfig cfg;
  cfg.max_bins = 32;
  cfg.day_bins = 16;
  cfg.learning_rate = 0.1;
  cfg.boosting_rounds_main = 300;
  cfg.boosting_rounds_interaction = 200;
  cfg.bag_count = 5;
  cfg.early_stop_patience = 20;
  cfg.rng_seed = seed;
  return cfg;
}

// Rows realizing a 2x2 table of binary marker x against death, plus
// `missing` rows with x unrecorded.
inline CohortTable table_from_counts(const TwoByTwo& t, std::size_t missing = 0) {
  const auto schema = schema_from_json(nlohmann::json::parse(R"({
    "features": [
      {"name": "admission_day", "kind": "continuous", "role": "admission_day"},
      {"name": "death", "kind": "binary", "role": "outcome"},
      {"name": "x", "kind": "binary", "role": "lab", "group": "grp", "rule": "> 1"}
    ]})"));
  std::ostringstream csv;
  csv << "patient_id,admission_day,death,x\n";
  std::size_t id = 0;
  auto emit = [&](std::uint64_t n, int dead, const char* x) {
    for (std::uint64_t i = 0; i < n; ++i) csv << "p" << id++ << ",0," << dead << ',' << x << '\n';
  };
  emit(t.a, 1, "1");
  emit(t.b, 0, "1");
  emit(t.c, 1, "0");
  emit(t.d, 0, "0");
  emit(missing, static_cast<int>(missing % 2), "");
  std::istringstream in(csv.str());
  return load_cohort(in, schema, "counts");
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tvgam_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& child = {}) const {
    return child.empty() ? path_.string() : (path_ / child).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace tvgam::testing
