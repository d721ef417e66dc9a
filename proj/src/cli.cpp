#include "tvgam/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tvgam/baselines.hpp"
#include "tvgam/cohort.hpp"
#include "tvgam/effects.hpp"
#include "tvgam/error.hpp"
#include "tvgam/gam.hpp"
#include "tvgam/metrics.hpp"
#include "tvgam/model_io.hpp"
#include "tvgam/report.hpp"
#include "tvgam/synth.hpp"

namespace tvgam::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw DataError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// Writes via a callback; returns the path for the summary.
template <typename Fn>
std::string write_file(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  fn(out);
  out.flush();
  if (!out) throw DataError("write to '" + path.string() + "' failed");
  return path.string();
}

std::string write_text(const fs::path& path, const std::string& text) {
  return write_file(path, [&](std::ostream& o) { o << text; });
}

fs::path output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

CohortTable load_table(const std::string& cohort, const std::string& schema_path) {
  const auto schema = schema_from_json(read_json(schema_path));
  std::ifstream in(cohort, std::ios::binary);
  if (!in) throw DataError("cannot open '" + cohort + "'");
  return load_cohort(in, schema, cohort);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Binary lab features that are model inputs: the default biomarker set.
std::vector<std::string> lab_biomarkers(const FeatureSchema& schema) {
  std::vector<std::string> out;
  for (const auto& f : schema.features()) {
    if (f.role == FeatureRole::lab && f.kind == FeatureKind::binary && f.model_input) {
      out.push_back(f.name);
    }
  }
  return out;
}

BagEnsemble load_model(const std::string& path) { return parse_ensemble(read_text(path)); }

int max_model_day(const BagEnsemble& ensemble) {
  const auto& m = ensemble.members.front();
  const auto f = m.feature_index(m.day_feature);
  if (!f) throw DataError("model has no admission-day feature");
  return static_cast<int>(m.bin_maps[*f].max_value);
}

std::vector<int> grid_or_default(const std::string& spec, int max_day) {
  return spec.empty() ? default_day_grid(max_day) : parse_day_grid(spec);
}

struct Common {
  std::string cohort;
  std::string schema;
  std::string out = ".";
};

void add_table_inputs(CLI::App* cmd, Common& c) {
  cmd->add_option("--cohort", c.cohort, "Cohort CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--schema", c.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
}

void add_out(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tree-based GAM with admission-day interactions for time-varying mortality risk",
               "tvgam"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  json summary;
  std::function<void()> action;

  // validate
  Common val;
  auto* validate = app.add_subcommand("validate", "Check a cohort against its schema");
  add_table_inputs(validate, val);
  validate->callback([&] {
    action = [&] {
      const auto table = load_table(val.cohort, val.schema);
      table.require_analysis_ready();
      std::size_t deaths = 0;
      int lo = 0;
      int hi = 0;
      for (std::size_t r = 0; r < table.rows(); ++r) {
        deaths += static_cast<std::size_t>(table.outcome(r));
        lo = r == 0 ? table.admission_day(r) : std::min(lo, table.admission_day(r));
        hi = r == 0 ? table.admission_day(r) : std::max(hi, table.admission_day(r));
      }
      json miss = json::object();
      for (const auto& [name, rate] : table.missingness()) {
        if (rate > 0.0) miss[name] = rate;
      }
      summary = {{"command", "validate"},
                 {"rows", table.rows()},
                 {"features", table.schema().size()},
                 {"deaths", deaths},
                 {"day_range", {lo, hi}},
                 {"missingness", std::move(miss)}};
    };
  });

  // exclude
  Common exc;
  std::string exclusion_config;
  auto* exclude = app.add_subcommand("exclude", "Apply cohort exclusion rules");
  add_table_inputs(exclude, exc);
  exclude->add_option("--config", exclusion_config, "Exclusion config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  add_out(exclude, exc);
  exclude->callback([&] {
    action = [&] {
      const auto table = load_table(exc.cohort, exc.schema);
      const auto cfg = exclusion_config_from_json(read_json(exclusion_config));
      const auto result = apply_exclusions(table, cfg);
      const auto dir = output_dir(exc.out);
      json outputs = json::array();
      outputs.push_back(write_file(dir / "cohort.csv",
                                   [&](std::ostream& o) { write_cohort(o, result.table); }));
      outputs.push_back(
          write_text(dir / "schema.json", schema_to_json(result.table.schema()).dump(2) + "\n"));
      const auto report = to_json(result.report);
      outputs.push_back(write_text(dir / "exclusion_report.json", report.dump(2) + "\n"));
      for (const auto& w : result.report.warnings) err << "warning: " << w << "\n";
      summary = {{"command", "exclude"},
                 {"input_rows", result.report.input_rows},
                 {"retained", result.report.retained},
                 {"outputs", outputs}};
    };
  });

  // binarize
  Common bin;
  std::string rules_path;
  auto* binarize = app.add_subcommand("binarize", "Derive binary biomarkers from lab values");
  add_table_inputs(binarize, bin);
  binarize->add_option("--rules", rules_path, "Binarization rules JSON")
      ->required()
      ->check(CLI::ExistingFile);
  add_out(binarize, bin);
  binarize->callback([&] {
    action = [&] {
      const auto table = load_table(bin.cohort, bin.schema);
      const auto rules = rules_from_json(read_json(rules_path));
      const auto result = apply_binarization(table, rules);
      const auto dir = output_dir(bin.out);
      json outputs = json::array();
      outputs.push_back(
          write_file(dir / "cohort.csv", [&](std::ostream& o) { write_cohort(o, result); }));
      outputs.push_back(
          write_text(dir / "schema.json", schema_to_json(result.schema()).dump(2) + "\n"));
      json derived = json::array();
      for (const auto& r : rules) derived.push_back(r.derived_name);
      summary = {{"command", "binarize"}, {"derived", derived}, {"outputs", outputs}};
    };
  });

  // train
  Common tr;
  GamConfig cfg;
  unsigned threads = 1;
  std::string interactions;
  bool no_ci_correction = false;
  bool skip_metrics = false;
  auto* train = app.add_subcommand("train", "Fit a bagged GAM ensemble");
  add_table_inputs(train, tr);
  add_out(train, tr);
  train->add_option("--bags", cfg.bag_count, "Number of bags")->capture_default_str();
  train->add_option("--seed", cfg.rng_seed, "Root random seed")->capture_default_str();
  train->add_option("--threads", threads, "Worker threads (results do not depend on it)")
      ->capture_default_str();
  train->add_option("--interactions", interactions,
                    "Comma-separated features given a day interaction, or 'none' "
                    "(default: binary lab features)");
  train->add_option("--max-bins", cfg.max_bins)->capture_default_str();
  train->add_option("--day-bins", cfg.day_bins)->capture_default_str();
  train->add_option("--learning-rate", cfg.learning_rate)->capture_default_str();
  train->add_option("--rounds-main", cfg.boosting_rounds_main)->capture_default_str();
  train->add_option("--rounds-interaction", cfg.boosting_rounds_interaction)->capture_default_str();
  train->add_option("--max-leaves", cfg.max_leaves_main)->capture_default_str();
  train->add_option("--max-cells", cfg.max_cells_interaction)->capture_default_str();
  train->add_option("--min-samples-leaf", cfg.min_samples_leaf)->capture_default_str();
  train->add_option("--bag-fraction", cfg.bag_fraction)->capture_default_str();
  train->add_option("--patience", cfg.early_stop_patience)->capture_default_str();
  train->add_option("--stop-tolerance", cfg.early_stop_tolerance,
                    "Minimum relative held-out gain for an interaction round")
      ->capture_default_str();
  train->add_option("--validation-fraction", cfg.validation_fraction)->capture_default_str();
  train->add_flag("--no-ci-correction", no_ci_correction,
                  "Use the raw bag spread for confidence bands");
  train->add_flag("--no-metrics", skip_metrics, "Skip out-of-bag AUC computation");
  train->callback([&] {
    action = [&] {
      cfg.subsample_ci_correction = !no_ci_correction;
      cfg.validate();
      const auto table = load_table(tr.cohort, tr.schema);
      std::vector<std::string> inter;
      if (interactions.empty()) {
        inter = lab_biomarkers(table.schema());
      } else if (interactions != "none") {
        inter = split_list(interactions);
      }
      const auto ensemble = fit_bagged(table, cfg, inter, threads);
      const auto dir = output_dir(tr.out);
      json outputs = json::array();
      outputs.push_back(write_text(dir / "model.json", serialize(ensemble)));
      const auto logits = predict_logits(ensemble, table);
      outputs.push_back(write_file(dir / "predictions.csv", [&](std::ostream& o) {
        write_predictions_csv(o, table, logits);
      }));
      summary = {{"command", "train"},
                 {"rows", table.rows()},
                 {"bags", ensemble.members.size()},
                 {"interactions", inter}};
      if (!skip_metrics && ensemble.members.size() >= 2) {
        const auto gam = auc_with_se(ensemble, table);
        const auto features = table.schema().modeled_features();
        const auto lr = logistic_auc_with_se(ensemble, table, features, threads);
        const json metrics = {{"gam", roc_json(gam)}, {"logistic_regression", roc_json(lr)}};
        outputs.push_back(write_text(dir / "metrics.json", metrics.dump(2) + "\n"));
        summary["gam_auc"] = gam.auc;
        summary["lr_auc"] = lr.auc;
      }
      summary["outputs"] = outputs;
    };
  });

  // effects
  std::string model_path;
  std::vector<std::string> biomarkers;
  std::vector<std::string> groups;
  std::string grid_spec;
  std::string window_spec;
  std::string shape_feature;
  std::optional<int> shape_day;
  Common eff;
  auto* effects = app.add_subcommand("effects", "Odds-ratio time series with confidence bands");
  effects->add_option("--model", model_path, "model.json")->required()->check(CLI::ExistingFile);
  effects->add_option("--biomarker", biomarkers, "Biomarker (repeatable)");
  effects->add_option("--group", groups, "Biomarker group (repeatable; default: all groups)");
  effects->add_option("--grid", grid_spec, "Day grid start:end:step (default 0:max:7)");
  effects->add_option("--window", window_spec,
                      "Also report the OR averaged over days lo:hi (exclusive hi)");
  effects->add_option("--shape", shape_feature, "Export a feature's shape and a threshold");
  effects->add_option("--day", shape_day, "Day at which --shape adds the interaction");
  add_out(effects, eff);
  effects->callback([&] {
    action = [&] {
      const auto ensemble = load_model(model_path);
      const auto days = grid_or_default(grid_spec, max_model_day(ensemble));
      const auto declared = ensemble_groups(ensemble);
      std::vector<EffectSeries> series;
      std::vector<BiomarkerGroup> subjects;
      for (const auto& b : biomarkers) {
        series.push_back(biomarker_or_series(ensemble, b, days));
        subjects.push_back({b, {b}});
      }
      auto find_group = [&](const std::string& name) {
        for (const auto& g : declared) {
          if (g.name == name) return g;
        }
        throw DataError("unknown biomarker group '" + name + "'");
      };
      std::vector<BiomarkerGroup> chosen;
      for (const auto& g : groups) chosen.push_back(find_group(g));
      if (biomarkers.empty() && groups.empty() && shape_feature.empty()) chosen = declared;
      for (const auto& g : chosen) {
        series.push_back(group_or_series(ensemble, g, days));
        subjects.push_back(g);
      }
      const auto dir = output_dir(eff.out);
      json outputs = json::array();
      summary = {{"command", "effects"}, {"days", days.size()}};
      if (!series.empty()) {
        outputs.push_back(write_file(dir / "effects.csv",
                                     [&](std::ostream& o) { write_effects_csv(o, series); }));
        outputs.push_back(write_text(dir / "effects.json", effects_json(series).dump(2) + "\n"));
        outputs.push_back(write_file(dir / "effects.svg", [&](std::ostream& o) {
          write_effects_svg(o, series, "Odds ratio of mortality by admission day");
        }));
        json subjects_json = json::array();
        for (const auto& s : series) subjects_json.push_back(s.subject);
        summary["subjects"] = subjects_json;
      }
      if (!window_spec.empty()) {
        const auto w = parse_window(window_spec);
        if (w.open_ended()) throw UsageError("--window needs a finite upper day");
        json averages = json::array();
        for (const auto& g : subjects) {
          const auto p = window_average_or(ensemble, g, w.lo, w.hi);
          averages.push_back({{"subject", g.name},
                              {"window", w.label()},
                              {"or", p.odds_ratio},
                              {"lower95", p.lower95},
                              {"upper95", p.upper95}});
        }
        outputs.push_back(write_text(dir / "window_effects.json", averages.dump(2) + "\n"));
      }
      if (!shape_feature.empty()) {
        const auto shape = shape_with_ci(ensemble, shape_feature, shape_day);
        outputs.push_back(write_file(dir / ("shape_" + shape_feature + ".csv"), [&](std::ostream& o) {
          write_shape_csv(o, shape_feature, shape);
        }));
        try {
          const auto t = select_threshold(curve_from_shape(shape));
          summary["threshold"] = {{"feature", shape_feature},
                                  {"threshold", t.threshold},
                                  {"direction", to_string(t.direction)},
                                  {"contrast", t.contrast}};
        } catch (const DataError& e) {
          summary["threshold"] = {{"feature", shape_feature}, {"error", e.what()}};
        }
      }
      if (outputs.empty()) throw UsageError("nothing to report");
      summary["outputs"] = outputs;
    };
  });

  // baseline
  Common base;
  std::string baseline_biomarkers;
  std::string confounders;
  std::string windows_spec;
  bool strict = false;
  auto* baseline = app.add_subcommand("baseline", "Univariable and windowed logistic ORs");
  add_table_inputs(baseline, base);
  add_out(baseline, base);
  baseline->add_option("--biomarkers", baseline_biomarkers,
                       "Comma-separated biomarkers (default: binary lab features)");
  baseline->add_option("--confounders", confounders,
                       "Comma-separated confounders (default: all other modeled features)");
  baseline->add_option("--windows", windows_spec, "Comma-separated lo:hi day windows")
      ->default_str("0:100,100:300,300:");
  baseline->add_flag("--strict", strict, "Exit 3 when a window's fit does not converge");
  baseline->callback([&] {
    action = [&] {
      const auto table = load_table(base.cohort, base.schema);
      const auto markers = baseline_biomarkers.empty() ? lab_biomarkers(table.schema())
                                                       : split_list(baseline_biomarkers);
      if (markers.empty()) throw UsageError("no biomarkers to tabulate");
      const auto conf = confounders.empty() ? default_confounders(table, markers)
                                            : split_list(confounders);
      const auto windows = windows_spec.empty() ? default_windows() : parse_windows(windows_spec);
      const auto result = windowed_or_table(table, markers, conf, windows);
      const auto dir = output_dir(base.out);
      json outputs = json::array();
      outputs.push_back(write_file(dir / "baseline_table.csv",
                                   [&](std::ostream& o) { write_baseline_csv(o, result); }));
      outputs.push_back(
          write_text(dir / "baseline_table.json", baseline_json(result).dump(2) + "\n"));
      summary = {{"command", "baseline"},
                 {"biomarkers", markers.size()},
                 {"window_status", result.window_status},
                 {"outputs", outputs}};
      if (strict) {
        for (std::size_t w = 0; w < result.windows.size(); ++w) {
          if (result.window_status[w] != to_string(FitStatus::converged)) {
            throw NumericError("window " + result.windows[w].label() +
                               " did not converge: " + result.window_status[w]);
          }
        }
      }
    };
  });

  // roc
  Common rc;
  std::string roc_model;
  std::size_t folds = 0;
  unsigned roc_threads = 1;
  auto* roc = app.add_subcommand("roc", "Discrimination of the GAM and logistic regression");
  roc->add_option("--model", roc_model, "model.json")->required()->check(CLI::ExistingFile);
  add_table_inputs(roc, rc);
  add_out(roc, rc);
  roc->add_option("--folds", folds, "Also run k-fold cross-validation (k >= 2)");
  roc->add_option("--threads", roc_threads, "Worker threads")->capture_default_str();
  roc->callback([&] {
    action = [&] {
      const auto ensemble = load_model(roc_model);
      const auto table = load_table(rc.cohort, rc.schema);
      const auto features = table.schema().modeled_features();
      json metrics = {{"gam", roc_json(auc_with_se(ensemble, table))},
                      {"logistic_regression",
                       roc_json(logistic_auc_with_se(ensemble, table, features, roc_threads))}};
      if (folds > 0) {
        metrics["gam_cv"] = roc_json(cv_auc_gam(table, ensemble.config(),
                                                ensemble.interaction_features, folds, roc_threads));
        metrics["logistic_regression_cv"] = roc_json(
            cv_auc_logistic(table, features, folds, ensemble.config().rng_seed, roc_threads));
      }
      const auto dir = output_dir(rc.out);
      json outputs = json::array();
      outputs.push_back(write_text(dir / "metrics.json", metrics.dump(2) + "\n"));
      const auto logits = predict_logits(ensemble, table);
      std::vector<int> labels(table.rows());
      for (std::size_t r = 0; r < labels.size(); ++r) labels[r] = table.outcome(r);
      const auto curve = roc_curve(logits, labels);
      outputs.push_back(write_file(dir / "roc_curve.csv",
                                   [&](std::ostream& o) { write_roc_curve_csv(o, curve); }));
      summary = {{"command", "roc"},
                 {"gam_auc", metrics["gam"]["auc"]},
                 {"lr_auc", metrics["logistic_regression"]["auc"]},
                 {"outputs", outputs}};
    };
  });

  // synth
  auto* synth = app.add_subcommand("synth", "Synthetic cohorts with known effects");
  synth->require_subcommand(1);
  std::string scenario;
  std::string truth_path;
  std::size_t synth_n = 20000;
  std::uint64_t synth_seed = 0;
  std::string synth_grid;
  Common gen_out;
  auto* gen = synth->add_subcommand("gen", "Generate a cohort, schema and truth");
  auto* scen_opt = gen->add_option("--scenario", scenario, "Bundled scenario (nyc-like)");
  auto* truth_opt = gen->add_option("--truth", truth_path, "Ground truth JSON")
                        ->check(CLI::ExistingFile);
  scen_opt->excludes(truth_opt);
  gen->add_option("--n", synth_n, "Patients")->capture_default_str();
  gen->add_option("--seed", synth_seed, "Random seed")->capture_default_str();
  gen->add_option("--grid", synth_grid, "Day grid for truth_curves.csv (default 0:max:7)");
  add_out(gen, gen_out);
  gen->callback([&] {
    action = [&] {
      GroundTruth truth;
      if (!truth_path.empty()) {
        truth = ground_truth_from_json(read_json(truth_path));
      } else if (scenario.empty() || scenario == "nyc-like") {
        truth = nyc_like_truth();
      } else {
        throw UsageError("unknown scenario '" + scenario + "'");
      }
      const auto table = generate_cohort(truth, synth_n, synth_seed);
      const auto dir = output_dir(gen_out.out);
      json outputs = json::array();
      outputs.push_back(
          write_file(dir / "cohort.csv", [&](std::ostream& o) { write_cohort(o, table); }));
      outputs.push_back(
          write_text(dir / "schema.json", schema_to_json(table.schema()).dump(2) + "\n"));
      outputs.push_back(write_text(dir / "truth.json", to_json(truth).dump(2) + "\n"));
      const auto days = grid_or_default(synth_grid, truth.max_day());
      outputs.push_back(write_file(dir / "truth_curves.csv", [&](std::ostream& o) {
        write_truth_curves(o, truth, days);
      }));
      std::size_t deaths = 0;
      for (std::size_t r = 0; r < table.rows(); ++r) deaths += table.outcome(r);
      summary = {{"command", "synth gen"},
                 {"rows", table.rows()},
                 {"deaths", deaths},
                 {"outputs", outputs}};
    };
  });

  std::string eval_model;
  std::string eval_truth;
  std::vector<std::string> eval_biomarkers;
  std::vector<std::string> eval_groups;
  Common eval_out;
  auto* eval = synth->add_subcommand("eval", "Compare fitted effects with the ground truth");
  eval->add_option("--model", eval_model, "model.json")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", eval_truth, "truth.json")->required()->check(CLI::ExistingFile);
  eval->add_option("--biomarker", eval_biomarkers, "Biomarker (repeatable)");
  eval->add_option("--group", eval_groups, "Group (repeatable)");
  eval->add_option("--grid", synth_grid, "Day grid (default 0:max:7)");
  add_out(eval, eval_out);
  eval->callback([&] {
    action = [&] {
      const auto ensemble = load_model(eval_model);
      const auto truth = ground_truth_from_json(read_json(eval_truth));
      const auto days =
          grid_or_default(synth_grid, std::min(max_model_day(ensemble), truth.max_day()));
      std::vector<std::string> markers = eval_biomarkers;
      std::vector<std::string> group_names = eval_groups;
      if (markers.empty() && group_names.empty()) {
        markers = ensemble.interaction_features;
        for (const auto& g : ensemble_groups(ensemble)) group_names.push_back(g.name);
      }
      json entries = json::array();
      auto add = [&](const RecoveryEntry& e) {
        entries.push_back({{"subject", e.subject},
                           {"max_abs_error", e.max_abs_error},
                           {"estimated_changepoint", e.estimated_changepoint},
                           {"true_changepoint", e.true_changepoint},
                           {"max_successive_diff", e.max_successive_diff},
                           {"true_max_successive_diff", e.true_max_successive_diff},
                           {"coverage", e.coverage}});
      };
      for (const auto& b : markers) {
        add(recovery_error(biomarker_or_series(ensemble, b, days), truth, b));
      }
      const auto declared = ensemble_groups(ensemble);
      for (const auto& name : group_names) {
        auto it = std::find_if(declared.begin(), declared.end(),
                               [&](const BiomarkerGroup& g) { return g.name == name; });
        if (it == declared.end()) throw DataError("unknown biomarker group '" + name + "'");
        add(recovery_error(group_or_series(ensemble, *it, days), truth, *it));
      }
      const auto dir = output_dir(eval_out.out);
      const json report = {{"days", days}, {"entries", entries}};
      summary = {{"command", "synth eval"},
                 {"entries", entries.size()},
                 {"outputs", {write_text(dir / "recovery.json", report.dump(2) + "\n")}}};
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    if (!action) throw UsageError("no subcommand");
    action();
    out << summary.dump() << "\n";
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    if (!summary.is_null()) out << summary.dump() << "\n";
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const json::exception& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace tvgam::cli
