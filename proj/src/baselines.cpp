#include "tvgam/baselines.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <Eigen/Dense>

#include "tvgam/error.hpp"
#include "tvgam/logistic.hpp"

namespace tvgam {

namespace {

constexpr double kZ95 = 1.96;
constexpr std::size_t kMaxIterations = 100;
constexpr double kScoreTolerance = 1e-8;
// Unpenalized curvature below this multiple of the ridge means the likelihood
// is flat in some direction: the ridge, not the data, is bounding the fit.
constexpr double kDegenerateCurvature = 1e3;

std::vector<std::size_t> window_rows(const CohortTable& table, DayWindow window) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (window.contains(table.admission_day(r))) rows.push_back(r);
  }
  return rows;
}

}  // namespace

OddsRatio odds_ratio(const TwoByTwo& t) {
  double a = static_cast<double>(t.a);
  double b = static_cast<double>(t.b);
  double c = static_cast<double>(t.c);
  double d = static_cast<double>(t.d);
  OddsRatio out;
  if (t.a == 0 || t.b == 0 || t.c == 0 || t.d == 0) {
    a += 0.5;
    b += 0.5;
    c += 0.5;
    d += 0.5;
    out.corrected = true;
  }
  const double log_or = std::log(a * d / (b * c));
  const double se = std::sqrt(1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d);
  out.odds_ratio = a * d / (b * c);
  out.lower95 = std::exp(log_or - kZ95 * se);
  out.upper95 = std::exp(log_or + kZ95 * se);
  return out;
}

TwoByTwo two_by_two(const CohortTable& table, std::string_view biomarker) {
  const auto& spec = table.schema().feature(biomarker);
  if (spec.kind != FeatureKind::binary) {
    throw DataError("biomarker '" + std::string(biomarker) + "' is not binary");
  }
  const auto x = table.column(biomarker);
  const auto y = table.column(table.schema().outcome_index());
  TwoByTwo t;
  std::size_t used = 0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (is_missing(x[r]) || is_missing(y[r])) continue;
    ++used;
    const bool exposed = x[r] == 1.0;
    const bool dead = y[r] == 1.0;
    if (exposed && dead) ++t.a;
    if (exposed && !dead) ++t.b;
    if (!exposed && dead) ++t.c;
    if (!exposed && !dead) ++t.d;
  }
  if (used == 0) {
    throw DataError("biomarker '" + std::string(biomarker) + "' is missing for every row");
  }
  return t;
}

OddsRatio univariable_or(const CohortTable& table, std::string_view biomarker) {
  return odds_ratio(two_by_two(table, biomarker));
}

std::string DayWindow::label() const {
  return "[" + std::to_string(lo) + "," + (open_ended() ? std::string("inf") : std::to_string(hi)) +
         ")";
}

DayWindow parse_window(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw UsageError("window must look like lo:hi");
  auto parse_int = [&](std::string_view s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw UsageError("bad window bound '" + std::string(s) + "'");
    }
  };
  DayWindow w;
  parse_int(text.substr(0, colon), w.lo);
  const auto hi = text.substr(colon + 1);
  if (!hi.empty() && hi != "inf") parse_int(hi, w.hi);
  if (w.hi <= w.lo) throw UsageError("empty window '" + std::string(text) + "'");
  return w;
}

std::vector<DayWindow> parse_windows(std::string_view comma_separated) {
  std::vector<DayWindow> out;
  while (!comma_separated.empty()) {
    const auto comma = comma_separated.find(',');
    out.push_back(parse_window(comma_separated.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    comma_separated.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<DayWindow> default_windows() {
  return {{0, 100}, {100, 300}, {300, std::numeric_limits<int>::max()}};
}

std::string_view to_string(FitStatus s) {
  switch (s) {
    case FitStatus::converged:
      return "converged";
    case FitStatus::max_iterations:
      return "max_iterations";
    case FitStatus::separation:
      return "separation";
  }
  return "?";
}

std::optional<std::size_t> LogisticFit::coefficient_index(std::string_view feature) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] == feature) return value_column[i];
  }
  return std::nullopt;
}

std::vector<double> LogisticFit::design_row(const CohortTable& table, std::size_t row) const {
  std::vector<double> x(names.size(), 0.0);
  x[0] = 1.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double v = table.value(row, table.schema().index_of(features[i]));
    if (value_column[i]) x[*value_column[i]] = is_missing(v) ? fill_means[i] : v;
    if (indicator_column[i]) x[*indicator_column[i]] = is_missing(v) ? 1.0 : 0.0;
  }
  return x;
}

double LogisticFit::predict_logit(const CohortTable& table, std::size_t row) const {
  const auto x = design_row(table, row);
  double z = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) z += x[j] * coefficients[j];
  return z;
}

double LogisticProblem::log_likelihood(std::span<const double> beta) const {
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) z += x[i][j] * beta[j];
    ll -= logistic_loss(y[i], z);
  }
  double norm = 0.0;
  for (double b : beta) norm += b * b;
  return ll - 0.5 * ridge * norm;
}

std::vector<double> LogisticProblem::score(std::span<const double> beta) const {
  std::vector<double> g(beta.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) z += x[i][j] * beta[j];
    const double r = logistic_residual(y[i], z);
    for (std::size_t j = 0; j < beta.size(); ++j) g[j] += x[i][j] * r;
  }
  for (std::size_t j = 0; j < beta.size(); ++j) g[j] -= ridge * beta[j];
  return g;
}

LogisticProblem logistic_problem(const CohortTable& table, const LogisticFit& fit) {
  LogisticProblem problem;
  problem.ridge = fit.ridge;
  for (auto r : window_rows(table, fit.window)) {
    problem.x.push_back(fit.design_row(table, r));
    problem.y.push_back(table.outcome(r));
  }
  return problem;
}

LogisticFit fit_logistic(const CohortTable& table, const std::vector<std::string>& features,
                         DayWindow window, double ridge) {
  if (!(ridge >= 0.0)) throw UsageError("ridge must be non-negative");
  table.require_analysis_ready();
  const auto rows = window_rows(table, window);
  std::size_t deaths = 0;
  for (auto r : rows) deaths += static_cast<std::size_t>(table.outcome(r));
  if (rows.empty() || deaths == 0 || deaths == rows.size()) {
    throw DataError("window " + window.label() + " is empty or has a single outcome class");
  }

  LogisticFit fit;
  fit.window = window;
  fit.rows = rows.size();
  fit.ridge = ridge;
  fit.names.push_back("(intercept)");
  for (const auto& name : features) {
    const auto col = table.column(name);
    double sum = 0.0;
    std::size_t present = 0;
    double first = kMissing;
    bool varies = false;
    for (auto r : rows) {
      const double v = col[r];
      if (is_missing(v)) continue;
      if (present == 0) first = v;
      varies = varies || v != first;
      sum += v;
      ++present;
    }
    fit.features.push_back(name);
    fit.fill_means.push_back(present ? sum / static_cast<double>(present) : 0.0);
    fit.value_column.emplace_back();
    fit.indicator_column.emplace_back();
    if (present == 0) {
      fit.dropped.push_back(name);
      continue;
    }
    if (varies) {
      fit.value_column.back() = fit.names.size();
      fit.names.push_back(name);
    } else {
      fit.dropped.push_back(name);
    }
    if (present < rows.size()) {
      fit.indicator_column.back() = fit.names.size();
      fit.names.push_back(name + "__missing");
    }
  }

  const auto p = static_cast<Eigen::Index>(fit.names.size());
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = fit.design_row(table, rows[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = row[static_cast<std::size_t>(j)];
    y(i) = table.outcome(rows[static_cast<std::size_t>(i)]);
  }

  auto penalized_ll = [&](const Eigen::VectorXd& beta) {
    const Eigen::VectorXd z = x * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ll -= logistic_loss(y(i), z(i));
    return ll - 0.5 * ridge * beta.squaredNorm();
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd w(n);
  Eigen::VectorXd resid(n);
  bool score_ok = false;
  double ll = penalized_ll(beta);
  for (std::size_t iter = 0; iter <= kMaxIterations; ++iter) {
    const Eigen::VectorXd z = x * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double pi = sigmoid(z(i));
      w(i) = pi * (1.0 - pi);
      resid(i) = y(i) - pi;
    }
    const Eigen::VectorXd score = x.transpose() * resid - ridge * beta;
    fit.iterations = iter;
    if (score.cwiseAbs().maxCoeff() / static_cast<double>(n) < kScoreTolerance) {
      score_ok = true;
      break;
    }
    if (iter == kMaxIterations) break;
    Eigen::MatrixXd h = x.transpose() * w.asDiagonal() * x;
    h.diagonal().array() += ridge;
    const Eigen::VectorXd step = h.ldlt().solve(score);
    // Newton step with halving until the penalized likelihood does not drop.
    double t = 1.0;
    Eigen::VectorXd next = beta + step;
    double next_ll = penalized_ll(next);
    for (int halvings = 0; halvings < 30 && !(next_ll >= ll); ++halvings) {
      t *= 0.5;
      next = beta + t * step;
      next_ll = penalized_ll(next);
    }
    beta = next;
    ll = next_ll;
  }

  const Eigen::VectorXd z = x * beta;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pi = sigmoid(z(i));
    w(i) = pi * (1.0 - pi);
  }
  const Eigen::MatrixXd info = x.transpose() * w.asDiagonal() * x;
  Eigen::MatrixXd h = info;
  h.diagonal().array() += ridge;
  const Eigen::MatrixXd cov = h.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  const double min_curvature = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                   info, Eigen::EigenvaluesOnly)
                                   .eigenvalues()
                                   .minCoeff();

  fit.coefficients.assign(beta.data(), beta.data() + p);
  fit.std_errors.resize(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    fit.std_errors[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, cov(j, j)));
  }
  if (!score_ok) {
    fit.status = FitStatus::max_iterations;
  } else if (min_curvature <= kDegenerateCurvature * std::max(ridge, 1e-300)) {
    fit.status = FitStatus::separation;
  } else {
    fit.status = FitStatus::converged;
  }
  fit.converged = fit.status == FitStatus::converged;
  return fit;
}

std::vector<std::string> default_confounders(const CohortTable& table,
                                             const std::vector<std::string>& biomarkers) {
  std::vector<std::string> out;
  for (const auto& name : table.schema().modeled_features()) {
    if (std::find(biomarkers.begin(), biomarkers.end(), name) == biomarkers.end()) {
      out.push_back(name);
    }
  }
  return out;
}

BaselineTable windowed_or_table(const CohortTable& table,
                                const std::vector<std::string>& biomarkers,
                                const std::vector<std::string>& confounders,
                                const std::vector<DayWindow>& windows) {
  if (windows.empty()) throw UsageError("at least one window is required");
  table.require_analysis_ready();
  auto sorted = windows;
  std::sort(sorted.begin(), sorted.end(),
            [](const DayWindow& a, const DayWindow& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i].hi > sorted[i + 1].lo) {
      throw UsageError("windows " + sorted[i].label() + " and " + sorted[i + 1].label() +
                       " overlap");
    }
  }
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const int day = table.admission_day(r);
    if (std::none_of(windows.begin(), windows.end(),
                     [&](const DayWindow& w) { return w.contains(day); })) {
      throw DataError("admission day " + std::to_string(day) + " of patient '" +
                      table.patient_id(r) + "' is outside every window");
    }
  }

  BaselineTable out;
  out.windows = windows;
  std::vector<std::string> features = biomarkers;
  for (const auto& c : confounders) {
    if (std::find(features.begin(), features.end(), c) == features.end()) features.push_back(c);
  }

  for (const auto& name : biomarkers) {
    const auto& spec = table.schema().feature(name);
    BaselineRow row;
    row.group = spec.group;
    row.biomarker = name;
    row.rule = spec.rule;
    try {
      const auto o = univariable_or(table, name);
      row.univariable = {true, o.odds_ratio, o.lower95, o.upper95,
                         o.corrected ? "zero cell; +0.5 correction" : ""};
    } catch (const DataError& e) {
      row.univariable.note = e.what();
    }
    out.rows.push_back(std::move(row));
  }

  for (const auto& w : windows) {
    std::size_t n = 0;
    for (std::size_t r = 0; r < table.rows(); ++r) n += w.contains(table.admission_day(r));
    out.window_rows.push_back(n);
    try {
      const auto fit = fit_logistic(table, features, w, out.ridge);
      out.window_status.emplace_back(to_string(fit.status));
      for (auto& row : out.rows) {
        OrCell cell;
        const auto j = fit.coefficient_index(row.biomarker);
        if (!j) {
          cell.note = "constant or missing in window";
        } else {
          const double b = fit.coefficients[*j];
          const double se = fit.std_errors[*j];
          cell.available = fit.converged;
          cell.odds_ratio = std::exp(b);
          cell.lower95 = std::exp(b - kZ95 * se);
          cell.upper95 = std::exp(b + kZ95 * se);
          if (!fit.converged) cell.note = std::string(to_string(fit.status));
        }
        row.windows.push_back(std::move(cell));
      }
    } catch (const DataError& e) {
      out.window_status.emplace_back(e.what());
      for (auto& row : out.rows) row.windows.push_back({false, 1.0, 1.0, 1.0, e.what()});
    }
  }
  return out;
}

}  // namespace tvgam
