// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "support.hpp"
#include "tvgam/baselines.hpp"
#include "tvgam/effects.hpp"
#include "tvgam/gam.hpp"
#include "tvgam/logistic.hpp"
#include "tvgam/metrics.hpp"
#include "tvgam/rng.hpp"
#include "tvgam/synth.hpp"

using namespace tvgam;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

unsigned worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// The nyc-like fit is shared by the recovery and discrimination checks.
struct NycRun {
  GroundTruth truth;
  CohortTable table;
  BagEnsemble ensemble;
  double seconds = 0.0;
};

const NycRun& nyc_run() {
  static const NycRun run = [] {
    NycRun r;
    const auto t0 = std::chrono::steady_clock::now();
    r.truth = nyc_like_truth();
    r.table = generate_cohort(r.truth, 20000, 7);
    GamConfig cfg;
    cfg.rng_seed = 7;
    std::vector<std::string> labs;
    for (const auto& f : r.truth.features) {
      if (f.kind == FeatureKind::binary && f.role == FeatureRole::lab) labs.push_back(f.name);
    }
    r.ensemble = fit_bagged(r.table, cfg, labs, worker_threads());
    r.seconds = seconds_since(t0);
    return r;
  }();
  return run;
}

Outcome step_recovery() {
  const auto& run = nyc_run();
  const auto t0 = std::chrono::steady_clock::now();
  const auto days = day_grid(0, run.truth.max_day(), 1);
  const auto series = biomarker_or_series(run.ensemble, kStepBiomarker, days);
  const auto rec = recovery_error(series, run.truth, kStepBiomarker);

  // Level on each side of the step, averaged over the day grid and leaving
  // out the 10 days either side of it.
  double pre = 0.0, post = 0.0, true_pre = 0.0, true_post = 0.0;
  std::size_t n_pre = 0, n_post = 0;
  for (const auto& p : series.points) {
    const double truth = run.truth.log_or(kStepBiomarker, p.day);
    if (p.day < 40) {
      pre += std::log(p.odds_ratio), true_pre += truth, ++n_pre;
    } else if (p.day >= 60) {
      post += std::log(p.odds_ratio), true_post += truth, ++n_post;
    }
  }
  pre /= n_pre, post /= n_post, true_pre /= n_pre, true_post /= n_post;
  const double err_pre = std::abs(pre - true_pre) / std::abs(true_pre);
  const double err_post = std::abs(post - true_post) / std::abs(true_post);
  const double total = run.seconds + seconds_since(t0);
  const bool pass = std::abs(rec.estimated_changepoint - 50) <= 10 && err_pre <= 0.2 &&
                    err_post <= 0.2 && total < 300.0;
  return {pass, fmt("changepoint day %d (true %d); pre %.3f vs %.2f (%.1f%%), post %.3f vs "
                    "%.2f (%.1f%%); %.1f s",
                    rec.estimated_changepoint, rec.true_changepoint, pre, true_pre, 100 * err_pre,
                    post, true_post, 100 * err_post, total)};
}

Outcome monotone_invariance() {
  const auto truth = nyc_like_truth();
  const auto table = generate_cohort(truth, 5000, 11);
  CohortTable transformed = table;
  std::size_t changed = 0;
  for (const auto& spec : table.schema().features()) {
    // Admission day must stay an integer day index.
    if (spec.kind != FeatureKind::continuous || spec.role == FeatureRole::admission_day) continue;
    const auto col = table.column(spec.name);
    std::vector<double> values(col.begin(), col.end());
    for (auto& v : values) {
      if (!is_missing(v)) v = std::log1p(v);
    }
    transformed = transformed.with_values(spec.name, std::move(values), "log1p " + spec.name);
    ++changed;
  }
  GamConfig cfg;
  cfg.bag_count = 5;
  cfg.rng_seed = 11;
  const std::vector<std::string> inter = {std::string(kStepBiomarker), "crp_high"};
  const auto a = predict_logits(fit_bagged(table, cfg, inter, worker_threads()), table);
  const auto b =
      predict_logits(fit_bagged(transformed, cfg, inter, worker_threads()), transformed);
  std::size_t differ = 0;
  for (std::size_t r = 0; r < a.size(); ++r) differ += a[r] != b[r];
  return {differ == 0 && changed > 0,
          fmt("%zu continuous features transformed; %zu of %zu predictions differ", changed,
              differ, a.size())};
}

Outcome auc_oracle() {
  Rng rng(2024);
  std::size_t mismatches = 0, with_ties = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(999);
    const std::size_t levels = 2 + rng.below(30);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(levels)) / static_cast<double>(levels);
      y[i] = rng.bernoulli(0.35) ? 1 : 0;
    }
    y[0] = 0, y[1] = 1;
    std::uint64_t twice_wins = 0, pos = 0, neg = 0;
    bool tie = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] == 1) ++pos; else ++neg;
      if (y[i] != 1) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (y[j] != 0) continue;
        twice_wins += s[i] > s[j] ? 2 : (s[i] == s[j] ? 1 : 0);
        tie = tie || s[i] == s[j];
      }
    }
    with_ties += tie;
    const double oracle = static_cast<double>(twice_wins) / static_cast<double>(2 * pos * neg);
    mismatches += roc_auc(s, y) != oracle;
  }
  return {mismatches == 0,
          fmt("%zu of 100 instances differ from the pairwise count (%zu with ties)", mismatches,
              with_ties)};
}

Outcome or_identities() {
  Rng rng(31);
  std::size_t cross_mismatch = 0;
  double worst_slope = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const TwoByTwo t{1 + rng.below(300), 1 + rng.below(300), 1 + rng.below(300),
                     1 + rng.below(300)};
    const auto table = testing::table_from_counts(t);
    const auto o = univariable_or(table, "x");
    const double cross = static_cast<double>(t.a * t.d) / static_cast<double>(t.b * t.c);
    cross_mismatch += o.odds_ratio != cross;
    if (trial < 25) {
      const auto fit = fit_logistic(table, {"x"});
      const double slope = fit.coefficients[*fit.coefficient_index("x")];
      worst_slope = std::max(worst_slope, std::abs(slope - std::log(cross)));
    }
  }
  return {cross_mismatch == 0 && worst_slope < 1e-6,
          fmt("%zu of 50 tables differ from ad/bc; worst |slope - log OR| %.2e", cross_mismatch,
              worst_slope)};
}

Outcome gradient_checks() {
  Rng rng(41);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double z = 12.0 * (rng.uniform() - 0.5);
    const double y = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const double h = 1e-5;
    const double fd = -(logistic_loss(y, z + h) - logistic_loss(y, z - h)) / (2.0 * h);
    const double exact = logistic_residual(y, z);
    worst = std::max(worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
  }
  const double worst_residual = worst;
  worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto table = testing::small_cohort(600, 500 + trial);
    const auto fit = fit_logistic(table, default_confounders(table, {}));
    const auto problem = logistic_problem(table, fit);
    for (int draw = 0; draw < 4; ++draw) {
      std::vector<double> beta = fit.coefficients;
      for (auto& b : beta) b += 0.5 * rng.normal();
      const auto score = problem.score(beta);
      for (std::size_t j = 0; j < beta.size(); ++j) {
        const double h = 1e-5 * std::max(1.0, std::abs(beta[j]));
        auto up = beta, down = beta;
        up[j] += h, down[j] -= h;
        const double fd = (problem.log_likelihood(up) - problem.log_likelihood(down)) / (2 * h);
        worst = std::max(worst, std::abs(fd - score[j]) / std::max(1.0, std::abs(score[j])));
      }
    }
  }
  return {worst_residual <= 1e-5 && worst <= 1e-5,
          fmt("worst relative error: residual %.2e, IRLS score %.2e", worst_residual, worst)};
}

Outcome centering() {
  const auto table = testing::small_cohort(5000, 61);
  const auto cfg = testing::fast_config(61);
  const auto model =
      fit_time_interactions(fit_main_effects(table, cfg), table, {"lab_step", "lab_const"}, cfg);
  const auto centered = center_model(model, table);
  const auto before = predict_logits(model, table);
  const auto after = predict_logits(centered, table);
  double worst_logit = 0.0;
  for (std::size_t r = 0; r < before.size(); ++r) {
    worst_logit = std::max(worst_logit, std::abs(before[r] - after[r]));
  }
  double worst_mean = 0.0;
  const auto n = static_cast<double>(table.rows());
  for (std::size_t f = 0; f < centered.mains.size(); ++f) {
    double s = 0.0;
    for (double v : table.column(centered.features[f])) {
      s += centered.mains[f].scores[centered.bin_maps[f].bin_of(v)];
    }
    worst_mean = std::max(worst_mean, std::abs(s / n));
  }
  for (const auto& shape : centered.interactions) {
    const auto f = *centered.feature_index(shape.feature);
    const auto col = table.column(shape.feature);
    double s = 0.0;
    for (std::size_t r = 0; r < table.rows(); ++r) {
      s += shape.at(centered.bin_maps[f].bin_of(col[r]),
                    shape.day_edges.bin_of(table.admission_day(r)));
    }
    worst_mean = std::max(worst_mean, std::abs(s / n));
  }
  return {worst_logit < 1e-12 && worst_mean < 1e-9,
          fmt("max logit change %.2e; max weighted shape mean %.2e", worst_logit, worst_mean)};
}

Outcome discrimination() {
  const auto& run = nyc_run();
  const auto gam = auc_with_se(run.ensemble, run.table);
  const auto lr = logistic_auc_with_se(run.ensemble, run.table,
                                       run.table.schema().modeled_features(), worker_threads());
  const double gap = gam.auc - lr.auc;
  return {gap >= 0.03, fmt("out-of-bag AUC: GAM %.4f +/- %.4f, LR %.4f +/- %.4f, gap %.4f",
                           gam.auc, gam.se, lr.auc, lr.se, gap)};
}

GroundTruth calibration_truth() {
  return ground_truth_from_json(nlohmann::json::parse(R"({
    "intercept": -1.3,
    "day_segments": [{"lo": 0, "hi": 300, "weight": 1}],
    "day_effect": {"x": [0, 300], "y": [0.4, -0.4]},
    "features": [
      {"name": "age", "kind": "continuous", "role": "demographic", "unit": "years",
       "distribution": {"type": "normal", "mean": 60, "sd": 15, "min": 18, "max": 100,
                        "decimals": 0},
       "static_effect": {"x": [18, 60, 100], "y": [-1.0, 0.0, 1.0]}},
      {"name": "lab_step", "kind": "binary", "role": "lab", "group": "g",
       "distribution": {"type": "bernoulli", "p": 0.5},
       "time_effect": {"day": {"x": [0, 150, 150, 300], "y": [-0.3, -0.3, 0.5, 0.5]}}},
      {"name": "lab_decay", "kind": "binary", "role": "lab", "group": "g",
       "distribution": {"type": "bernoulli", "p": 0.4},
       "time_effect": {"day": {"x": [0, 300], "y": [0.6, 0.0]}}},
      {"name": "lab_const", "kind": "binary", "role": "lab", "group": "g",
       "distribution": {"type": "bernoulli", "p": 0.3},
       "static_effect": {"x": [0, 1], "y": [0, 0.4]}}
    ]})"));
}

Outcome ci_calibration() {
  const auto truth = calibration_truth();
  const std::vector<std::string> labs = {"lab_step", "lab_decay", "lab_const"};
  const auto days = day_grid(0, 290, 10);
  constexpr int kSeeds = 50;
  std::vector<std::size_t> covered(kSeeds, 0), total(kSeeds, 0);
  const unsigned threads = worker_threads();
  for (int s = 0; s < kSeeds; ++s) {
    const auto table = generate_cohort(truth, 4000, 1000 + s);
    GamConfig cfg;
    cfg.rng_seed = 1000 + s;
    const auto ensemble = fit_bagged(table, cfg, labs, threads);
    for (const auto& lab : labs) {
      for (const auto& p : biomarker_or_series(ensemble, lab, days).points) {
        const double t = truth.log_or(lab, p.day);
        covered[s] += std::log(p.lower95) <= t && t <= std::log(p.upper95);
        ++total[s];
      }
    }
  }
  std::size_t c = 0, n = 0;
  for (int s = 0; s < kSeeds; ++s) c += covered[s], n += total[s];
  const double coverage = static_cast<double>(c) / static_cast<double>(n);
  return {coverage >= 0.85, fmt("coverage %.3f over %zu grid points (%d seeds, 25 bags)",
                                coverage, n, kSeeds)};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  testing::TempDir dir("determinism");
  const std::string cli = TVGAM_CLI_PATH;
  auto sh = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > \"" + dir.str("log.txt") + "\" 2>&1";
    return std::system(cmd.c_str());
  };
  if (sh("synth gen --scenario nyc-like --n 3000 --seed 7 --out \"" + dir.str("data") + "\"") != 0) {
    return {false, "synth gen failed"};
  }
  const std::string inputs = "--cohort \"" + dir.str("data/cohort.csv") + "\" --schema \"" +
                             dir.str("data/schema.json") + "\" --bags 8 --seed 7";
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"a", "1"}, {"b", "1"}, {"c", "8"}};
  for (const auto& [name, threads] : runs) {
    if (sh("train " + inputs + " --threads " + threads + " --out \"" + dir.str(name) + "\"") != 0) {
      return {false, "train failed: " + slurp(dir.str("log.txt"))};
    }
  }
  const auto a = slurp(dir.str("a/model.json"));
  const bool same_twice = !a.empty() && a == slurp(dir.str("b/model.json"));
  const bool same_threads = a == slurp(dir.str("c/model.json"));
  return {same_twice && same_threads,
          fmt("repeat run %s; --threads 1 vs 8 %s (%zu bytes)",
              same_twice ? "identical" : "DIFFERS", same_threads ? "identical" : "DIFFERS",
              a.size())};
}

Outcome threshold_selection() {
  Rng rng(71);
  std::size_t wrong = 0, shift_changed = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.below(40);
    const std::size_t cut = rng.below(n - 1);
    const double low = rng.normal();
    const double high = low + (rng.bernoulli(0.5) ? 1.0 : -1.0) * (0.2 + rng.uniform());
    std::vector<CurvePoint> curve;
    double mid = 10.0 * rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
      mid += 0.5 + rng.uniform();
      curve.push_back({mid, i <= cut ? low : high, 1.0 + rng.below(200)});
    }
    const auto t = select_threshold(curve);
    const auto want = high > low ? RuleDirection::greater_than : RuleDirection::less_than;
    wrong += t.threshold != curve[cut].midpoint || t.direction != want;
    for (double shift : {-7.5, 0.125, 1e3}) {
      auto moved = curve;
      for (auto& p : moved) p.score += shift;
      const auto u = select_threshold(moved);
      shift_changed += u.threshold != t.threshold || u.direction != t.direction;
    }
  }
  return {wrong == 0 && shift_changed == 0,
          fmt("%zu of 200 two-level curves missed the cut; %zu of 600 shifted curves changed",
              wrong, shift_changed)};
}

}  // namespace

// Optional arguments restrict the run to the named criteria.
int main(int argc, char** argv) {
  const std::vector<std::string> only(argv + 1, argv + argc);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"step_recovery", step_recovery},
      {"monotone_transform_invariance", monotone_invariance},
      {"auc_oracle_equivalence", auc_oracle},
      {"or_identities", or_identities},
      {"gradient_checks", gradient_checks},
      {"centering_gauge_invariance", centering},
      {"discrimination_gap", discrimination},
      {"ci_calibration", ci_calibration},
      {"determinism", determinism},
      {"threshold_selection", threshold_selection},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
