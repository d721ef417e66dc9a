#include "tvgam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tvgam/baselines.hpp"
#include "tvgam/error.hpp"
#include "tvgam/parallel.hpp"
#include "tvgam/rng.hpp"
#include "tvgam/stats.hpp"

namespace tvgam {

namespace {

constexpr std::uint64_t kFoldStream = 0xF01D;

std::vector<std::size_t> order_by_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  return order;
}

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw UsageError("scores and labels differ in length");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw NumericError("NaN score");
    if (labels[i] != 0 && labels[i] != 1) throw DataError("labels must be 0 or 1");
  }
}

std::vector<int> outcomes(const CohortTable& table) {
  std::vector<int> y(table.rows());
  for (std::size_t r = 0; r < y.size(); ++r) y[r] = table.outcome(r);
  return y;
}

std::vector<std::size_t> complement(const std::vector<std::size_t>& sorted_rows, std::size_t n) {
  std::vector<std::size_t> out;
  std::size_t k = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (k < sorted_rows.size() && sorted_rows[k] == r) {
      ++k;
    } else {
      out.push_back(r);
    }
  }
  return out;
}

bool both_classes(std::span<const std::size_t> rows, const std::vector<int>& y) {
  bool pos = false;
  bool neg = false;
  for (auto r : rows) (y[r] ? pos : neg) = true;
  return pos && neg;
}

// AUC of `score(row)` over the given rows, or NaN when they hold one class.
template <typename ScoreFn>
double split_auc(std::span<const std::size_t> rows, const std::vector<int>& y, ScoreFn&& score) {
  if (!both_classes(rows, y)) return std::nan("");
  std::vector<double> s;
  std::vector<int> l;
  s.reserve(rows.size());
  l.reserve(rows.size());
  for (auto r : rows) {
    s.push_back(score(r));
    l.push_back(y[r]);
  }
  return roc_auc(s, l);
}

RocResult collect(const std::vector<double>& per_split, AucMethod method,
                  const std::vector<int>& y) {
  std::vector<double> used;
  std::size_t skipped = 0;
  for (double a : per_split) {
    if (std::isnan(a)) {
      ++skipped;
    } else {
      used.push_back(a);
    }
  }
  const auto pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  return summarize_auc(std::move(used), method, skipped, pos, y.size() - pos);
}

}  // namespace

AucCount auc_count(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto order = order_by_score(scores);
  AucCount out;
  std::uint64_t negatives_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? pos : neg) += 1;
      ++j;
    }
    out.numerator += 2 * pos * negatives_below + pos * neg;
    negatives_below += neg;
    out.n_pos += pos;
    out.n_neg += neg;
    i = j;
  }
  if (out.n_pos == 0 || out.n_neg == 0) throw DataError("AUC needs both outcome classes");
  out.denominator = 2 * static_cast<std::uint64_t>(out.n_pos) * out.n_neg;
  return out;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  return auc_count(scores, labels).value();
}

std::string_view to_string(AucMethod m) {
  return m == AucMethod::bag_variation ? "bag_variation" : "fold_cv";
}

RocResult summarize_auc(std::vector<double> split_aucs, AucMethod method, std::size_t skipped,
                        std::size_t n_pos, std::size_t n_neg) {
  if (split_aucs.size() < 2) {
    throw DataError("AUC standard error needs at least two usable splits (" +
                    std::to_string(skipped) + " skipped for a single outcome class)");
  }
  RocResult r;
  r.auc = mean(split_aucs);
  r.se = sample_sd(split_aucs) / std::sqrt(static_cast<double>(split_aucs.size()));
  r.n_pos = n_pos;
  r.n_neg = n_neg;
  r.method = method;
  r.split_aucs = std::move(split_aucs);
  r.skipped = skipped;
  return r;
}

RocResult auc_with_se(const BagEnsemble& ensemble, const CohortTable& table) {
  if (ensemble.members.size() < 2) throw UsageError("AUC standard error needs at least two bags");
  if (table.rows() != ensemble.table_rows || ensemble.bag_rows.size() != ensemble.members.size()) {
    throw DataError("table does not match the ensemble's fitting table");
  }
  const auto y = outcomes(table);
  std::vector<double> per_bag(ensemble.members.size());
  for (std::size_t b = 0; b < per_bag.size(); ++b) {
    const auto oob = complement(ensemble.bag_rows[b], table.rows());
    const auto logits = predict_logits(ensemble.members[b], table);
    per_bag[b] = split_auc(oob, y, [&](std::size_t r) { return logits[r]; });
  }
  return collect(per_bag, AucMethod::bag_variation, y);
}

RocResult logistic_auc_with_se(const BagEnsemble& ensemble, const CohortTable& table,
                               const std::vector<std::string>& features, unsigned threads) {
  if (ensemble.members.size() < 2) throw UsageError("AUC standard error needs at least two bags");
  if (table.rows() != ensemble.table_rows || ensemble.bag_rows.size() != ensemble.members.size()) {
    throw DataError("table does not match the ensemble's fitting table");
  }
  const auto y = outcomes(table);
  std::vector<double> per_bag(ensemble.bag_rows.size());
  parallel_for(per_bag.size(), threads, [&](std::size_t b) {
    const auto& rows = ensemble.bag_rows[b];
    const auto fit = fit_logistic(table.select_rows(rows, "bag"), features);
    const auto oob = complement(rows, table.rows());
    per_bag[b] = split_auc(oob, y, [&](std::size_t r) { return fit.predict_logit(table, r); });
  });
  return collect(per_bag, AucMethod::bag_variation, y);
}

std::vector<std::size_t> fold_assignment(const CohortTable& table, std::size_t k,
                                         std::uint64_t seed) {
  if (k < 2) throw UsageError("cross-validation needs at least two folds");
  std::vector<std::size_t> fold(table.rows(), 0);
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < table.rows(); ++r) {
      if (table.outcome(r) == cls) rows.push_back(r);
    }
    Rng rng(derive_seed(seed, kFoldStream, static_cast<std::uint64_t>(cls)));
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.below(i)]);
    for (std::size_t i = 0; i < rows.size(); ++i) fold[rows[i]] = i % k;
  }
  return fold;
}

namespace {

template <typename FitAndScore>
RocResult cross_validate(const CohortTable& table, std::size_t k, std::uint64_t seed,
                         unsigned threads, FitAndScore&& fit_and_score) {
  table.require_analysis_ready();
  const auto fold = fold_assignment(table, k, seed);
  const auto y = outcomes(table);
  std::vector<double> per_fold(k);
  parallel_for(k, threads, [&](std::size_t f) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (std::size_t r = 0; r < fold.size(); ++r) (fold[r] == f ? test : train).push_back(r);
    if (!both_classes(test, y)) {
      per_fold[f] = std::nan("");
      return;
    }
    const auto scores = fit_and_score(table.select_rows(train, "fold train"),
                                      table.select_rows(test, "fold test"));
    std::vector<int> labels;
    for (auto r : test) labels.push_back(y[r]);
    per_fold[f] = roc_auc(scores, labels);
  });
  return collect(per_fold, AucMethod::fold_cv, y);
}

}  // namespace

RocResult cv_auc_gam(const CohortTable& table, const GamConfig& cfg,
                     const std::vector<std::string>& interaction_features, std::size_t k,
                     unsigned threads) {
  GamConfig single = cfg;
  single.bag_count = 1;
  single.bag_fraction = 1.0;
  return cross_validate(table, k, cfg.rng_seed, threads,
                        [&](const CohortTable& train, const CohortTable& test) {
                          const auto ensemble = fit_bagged(train, single, interaction_features);
                          return predict_logits(ensemble, test);
                        });
}

RocResult cv_auc_logistic(const CohortTable& table, const std::vector<std::string>& features,
                          std::size_t k, std::uint64_t seed, unsigned threads) {
  return cross_validate(table, k, seed, threads,
                        [&](const CohortTable& train, const CohortTable& test) {
                          const auto fit = fit_logistic(train, features);
                          std::vector<double> s(test.rows());
                          for (std::size_t r = 0; r < s.size(); ++r) s[r] = fit.predict_logit(test, r);
                          return s;
                        });
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  const auto count = auc_count(scores, labels);
  auto order = order_by_score(scores);
  std::reverse(order.begin(), order.end());
  std::vector<RocPoint> points{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] ? tp : fp) += 1;
      ++i;
    }
    points.push_back({s, static_cast<double>(fp) / static_cast<double>(count.n_neg),
                      static_cast<double>(tp) / static_cast<double>(count.n_pos)});
  }
  return points;
}

}  // namespace tvgam
