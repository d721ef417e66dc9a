#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tvgam/cohort.hpp"

namespace tvgam {

// a: exposed & dead, b: exposed & alive, c: unexposed & dead,
// d: unexposed & alive.
struct TwoByTwo {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
  std::uint64_t d = 0;
};

struct OddsRatio {
  double odds_ratio = 1.0;
  double lower95 = 1.0;
  double upper95 = 1.0;
  bool corrected = false;  // Haldane-Anscombe +0.5 applied
};

// Cross-product OR with a Woolf (log-scale Wald) 95% interval. Adds 0.5 to
// every cell when any cell is zero.
OddsRatio odds_ratio(const TwoByTwo& t);

TwoByTwo two_by_two(const CohortTable& table, std::string_view biomarker);

// Unadjusted OR of mortality for biomarker = 1 over rows where it is recorded.
OddsRatio univariable_or(const CohortTable& table, std::string_view biomarker);

// Half-open admission-day interval [lo, hi).
struct DayWindow {
  int lo = 0;
  int hi = std::numeric_limits<int>::max();

  bool contains(int day) const { return day >= lo && day < hi; }
  bool open_ended() const { return hi == std::numeric_limits<int>::max(); }
  std::string label() const;
};

// Parses "lo:hi" (hi may be empty for an open window).
DayWindow parse_window(std::string_view text);
std::vector<DayWindow> parse_windows(std::string_view comma_separated);
std::vector<DayWindow> default_windows();

enum class FitStatus { converged, max_iterations, separation };
std::string_view to_string(FitStatus s);

inline constexpr double kDefaultRidge = 1e-8;

struct LogisticFit {
  // Column names: "(intercept)", the features, and "<feature>__missing"
  // indicator columns for features with missing values in the window.
  std::vector<std::string> names;
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  // Per input feature: value substituted for missing cells and the
  // coefficient positions of its value and missing-indicator columns.
  std::vector<std::string> features;
  std::vector<double> fill_means;
  std::vector<std::optional<std::size_t>> value_column;
  std::vector<std::optional<std::size_t>> indicator_column;
  // Features dropped because they are constant within the window.
  std::vector<std::string> dropped;
  bool converged = false;
  FitStatus status = FitStatus::max_iterations;
  std::size_t iterations = 0;
  DayWindow window;
  std::size_t rows = 0;
  double ridge = kDefaultRidge;

  // Coefficient index of a feature's value column, if it was kept.
  std::optional<std::size_t> coefficient_index(std::string_view feature) const;
  // Design row (intercept first) for one table row.
  std::vector<double> design_row(const CohortTable& table, std::size_t row) const;
  double predict_logit(const CohortTable& table, std::size_t row) const;
};

// Ridge-stabilized IRLS fit of the logistic likelihood on rows whose
// admission day falls in `window`. Missing values are mean-filled with an
// added indicator column. Stops when max|score|/n < 1e-8 or after 100
// iterations; a fit whose unpenalized curvature is degenerate (separation or
// collinearity) is reported with status `separation`.
LogisticFit fit_logistic(const CohortTable& table, const std::vector<std::string>& features,
                         DayWindow window = {}, double ridge = kDefaultRidge);

// Design matrix helpers exposed for verification.
struct LogisticProblem {
  std::vector<std::vector<double>> x;  // rows, intercept column first
  std::vector<double> y;
  double ridge = kDefaultRidge;

  // Penalized log-likelihood and its gradient (the score).
  double log_likelihood(std::span<const double> beta) const;
  std::vector<double> score(std::span<const double> beta) const;
};

LogisticProblem logistic_problem(const CohortTable& table, const LogisticFit& fit);

struct OrCell {
  bool available = false;
  double odds_ratio = 1.0;
  double lower95 = 1.0;
  double upper95 = 1.0;
  std::string note;
};

struct BaselineRow {
  std::string group;
  std::string biomarker;
  std::string rule;
  OrCell univariable;
  std::vector<OrCell> windows;
};

struct BaselineTable {
  std::vector<DayWindow> windows;
  std::vector<std::size_t> window_rows;
  std::vector<std::string> window_status;
  std::vector<BaselineRow> rows;
  double ridge = kDefaultRidge;
};

// One logistic fit per window over the biomarkers plus confounders; each
// biomarker's OR = exp(coef) with exp(coef -/+ 1.96 SE). Windows must be
// disjoint and cover every row's admission day. A window whose fit fails
// marks its cells unavailable.
BaselineTable windowed_or_table(const CohortTable& table, const std::vector<std::string>& biomarkers,
                                const std::vector<std::string>& confounders,
                                const std::vector<DayWindow>& windows);

// Every modeled feature that is not itself a listed biomarker.
std::vector<std::string> default_confounders(const CohortTable& table,
                                             const std::vector<std::string>& biomarkers);

}  // namespace tvgam
