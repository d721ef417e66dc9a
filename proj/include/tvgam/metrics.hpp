#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tvgam/cohort.hpp"
#include "tvgam/gam.hpp"

namespace tvgam {

// Mann-Whitney count behind the AUC: numerator = 2 * (pairs where the
// positive scores higher) + (tied pairs), denominator = 2 * P * N.
struct AucCount {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;

  double value() const {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

// Sort-based rank statistic, O(n log n). Labels must be 0 or 1 with both
// present; scores must not be NaN.
AucCount auc_count(std::span<const double> scores, std::span<const int> labels);
double roc_auc(std::span<const double> scores, std::span<const int> labels);

enum class AucMethod { bag_variation, fold_cv };
std::string_view to_string(AucMethod m);

struct RocResult {
  double auc = 0.5;
  double se = 0.0;  // SD of per-split AUCs over sqrt(k)
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  AucMethod method = AucMethod::bag_variation;
  std::vector<double> split_aucs;
  // Splits whose evaluation rows held a single outcome class.
  std::size_t skipped = 0;
};

// Mean and standard error of per-split AUCs. Throws DataError when fewer
// than two splits are usable.
RocResult summarize_auc(std::vector<double> split_aucs, AucMethod method, std::size_t skipped,
                        std::size_t n_pos, std::size_t n_neg);

// Out-of-bag AUC of each ensemble member on the rows outside its bag.
RocResult auc_with_se(const BagEnsemble& ensemble, const CohortTable& table);

// Logistic regression on all admission days, refit on each of the
// ensemble's bags and scored on that bag's out-of-bag rows.
RocResult logistic_auc_with_se(const BagEnsemble& ensemble, const CohortTable& table,
                               const std::vector<std::string>& features, unsigned threads = 1);

// Outcome-stratified assignment of rows to k folds.
std::vector<std::size_t> fold_assignment(const CohortTable& table, std::size_t k,
                                         std::uint64_t seed);

// k-fold cross-validated AUC of a single (unbagged) GAM fit per fold.
RocResult cv_auc_gam(const CohortTable& table, const GamConfig& cfg,
                     const std::vector<std::string>& interaction_features, std::size_t k,
                     unsigned threads = 1);
RocResult cv_auc_logistic(const CohortTable& table, const std::vector<std::string>& features,
                          std::size_t k, std::uint64_t seed, unsigned threads = 1);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

// Operating points from the strictest threshold to the loosest, starting at
// (0, 0); tied scores form one step.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);

}  // namespace tvgam
