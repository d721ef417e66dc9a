#include <doctest.h>

#include <cmath>
#include <vector>

#include "support.hpp"
#include "tvgam/error.hpp"
#include "tvgam/metrics.hpp"
#include "tvgam/rng.hpp"

using namespace tvgam;

namespace {

// Pairwise comparison count over every positive-negative pair.
AucCount pairwise_oracle(const std::vector<double>& s, const std::vector<int>& y) {
  AucCount c;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    ++c.n_pos;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      c.numerator += s[i] > s[j] ? 2 : (s[i] == s[j] ? 1 : 0);
    }
  }
  for (int v : y) c.n_neg += v == 0;
  c.denominator = 2 * static_cast<std::uint64_t>(c.n_pos) * c.n_neg;
  return c;
}

}  // namespace

TEST_CASE("AUC worked examples") {
  CHECK(roc_auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1}) == 0.75);
  CHECK(roc_auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1}) == 1.0);
  CHECK(roc_auc(std::vector<double>{0.3, 0.3, 0.3}, std::vector<int>{0, 1, 0}) == 0.5);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), DataError);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{0, 2}), DataError);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{0.1}, std::vector<int>{0, 1}), UsageError);
}

TEST_CASE("AUC count equals the pairwise oracle with ties") {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(999);
    const std::size_t levels = 1 + rng.below(20);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial % 2 ? static_cast<double>(rng.below(levels)) : rng.normal();
      y[i] = rng.bernoulli(0.3) ? 1 : 0;
    }
    y[0] = 0;
    y[1] = 1;
    const auto fast = auc_count(s, y);
    const auto slow = pairwise_oracle(s, y);
    REQUIRE(fast.numerator == slow.numerator);
    REQUIRE(fast.denominator == slow.denominator);
    CHECK(fast.n_pos == slow.n_pos);
  }
}

TEST_CASE("ROC curve steps through tied scores") {
  const std::vector<double> s = {0.9, 0.8, 0.8, 0.3};
  const std::vector<int> y = {1, 1, 0, 0};
  const auto curve = roc_curve(s, y);
  REQUIRE(curve.size() == 4);
  CHECK(curve[0].fpr == 0.0);
  CHECK(curve[0].tpr == 0.0);
  CHECK(curve[1].threshold == 0.9);
  CHECK(curve[1].tpr == 0.5);
  CHECK(curve[2].threshold == 0.8);
  CHECK(curve[2].tpr == 1.0);
  CHECK(curve[2].fpr == 0.5);
  CHECK(curve[3].fpr == 1.0);
  // Trapezoid area equals the rank AUC.
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) * 0.5 * (curve[i].tpr + curve[i - 1].tpr);
  }
  CHECK(area == doctest::Approx(roc_auc(s, y)));
}

TEST_CASE("AUC summary is mean and SD over sqrt(k)") {
  const auto r = summarize_auc({0.7, 0.8, 0.9}, AucMethod::fold_cv, 1, 10, 20);
  CHECK(r.auc == doctest::Approx(0.8));
  CHECK(r.se == doctest::Approx(0.1 / std::sqrt(3.0)));
  CHECK(r.skipped == 1);
  CHECK(summarize_auc({0.8, 0.8}, AucMethod::bag_variation, 0, 1, 1).se == 0.0);
  CHECK_THROWS_AS(summarize_auc({0.8}, AucMethod::bag_variation, 0, 1, 1), DataError);
}

TEST_CASE("fold assignment is stratified and reproducible") {
  const auto table = testing::small_cohort(1000, 103);
  const auto folds = fold_assignment(table, 5, 7);
  CHECK(folds == fold_assignment(table, 5, 7));
  std::vector<std::size_t> pos(5, 0), all(5, 0);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    REQUIRE(folds[r] < 5);
    ++all[folds[r]];
    pos[folds[r]] += table.outcome(r);
  }
  for (std::size_t k = 1; k < 5; ++k) {
    CHECK(std::abs(static_cast<long>(all[k]) - static_cast<long>(all[0])) <= 2);
    CHECK(std::abs(static_cast<long>(pos[k]) - static_cast<long>(pos[0])) <= 1);
  }
}

TEST_CASE("out-of-bag and cross-validated AUCs agree") {
  const auto table = testing::small_cohort(4000, 105);
  auto cfg = testing::fast_config(105);
  const std::vector<std::string> inter = {"lab_step"};
  const auto ensemble = fit_bagged(table, cfg, inter, 4);
  const auto oob = auc_with_se(ensemble, table);
  CHECK(oob.method == AucMethod::bag_variation);
  CHECK(oob.split_aucs.size() + oob.skipped == cfg.bag_count);
  CHECK(oob.auc > 0.6);

  const auto cv = cv_auc_gam(table, cfg, inter, 5, 4);
  CHECK(cv.method == AucMethod::fold_cv);
  CHECK(std::abs(cv.auc - oob.auc) < 2.0 * std::hypot(cv.se, oob.se) + 0.01);

  const auto features = table.schema().modeled_features();
  const auto lr = logistic_auc_with_se(ensemble, table, features, 2);
  CHECK(lr.split_aucs.size() == oob.split_aucs.size());
  const auto lr_cv = cv_auc_logistic(table, features, 5, 105, 2);
  CHECK(std::abs(lr_cv.auc - lr.auc) < 2.0 * std::hypot(lr_cv.se, lr.se) + 0.01);
}

TEST_CASE("identical bags have zero AUC spread") {
  const auto table = testing::small_cohort(1500, 107);
  auto cfg = testing::fast_config(107);
  cfg.bag_count = 3;
  auto ensemble = fit_bagged(table, cfg, {}, 1);
  for (auto& m : ensemble.members) m = ensemble.members.front();
  for (auto& rows : ensemble.bag_rows) rows = ensemble.bag_rows.front();
  CHECK(auc_with_se(ensemble, table).se == 0.0);
}
