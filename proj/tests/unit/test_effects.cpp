#include <doctest.h>

#include <cmath>
#include <vector>

#include "support.hpp"
#include "tvgam/effects.hpp"
#include "tvgam/error.hpp"
#include "tvgam/rng.hpp"

using namespace tvgam;

namespace {

// Small fitted ensemble whose shapes the tests overwrite.
BagEnsemble template_ensemble() {
  static const BagEnsemble cached = [] {
    const auto table = testing::small_cohort(1500, 71);
    auto cfg = testing::fast_config(71);
    cfg.bag_count = 4;
    return fit_bagged(table, cfg, {"lab_step", "lab_const", "lab_null"}, 2);
  }();
  return cached;
}

void zero_shapes(BagEnsemble& e) {
  for (auto& m : e.members) {
    for (auto& s : m.mains) std::fill(s.scores.begin(), s.scores.end(), 0.0);
    for (auto& i : m.interactions) std::fill(i.grid.begin(), i.grid.end(), 0.0);
  }
}

// Sets a binary feature's log OR to `value` in every member via its main.
void set_log_or(BagEnsemble& e, const std::string& name, double value) {
  for (auto& m : e.members) {
    const auto f = *m.feature_index(name);
    m.mains[f].scores[m.bin_maps[f].bin_of(1.0)] = value;
    m.mains[f].scores[m.bin_maps[f].bin_of(0.0)] = 0.0;
  }
}

// Exhaustive scan of weighted right-minus-left contrasts; returns the index
// of the last low-side bin of the best boundary.
std::size_t best_boundary(const std::vector<CurvePoint>& curve) {
  std::size_t best = 0;
  double top = -1.0;
  for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
    double lw = 0, ls = 0, rw = 0, rs = 0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      (i <= k ? lw : rw) += curve[i].weight;
      (i <= k ? ls : rs) += curve[i].weight * curve[i].score;
    }
    const double contrast = std::abs(rs / rw - ls / lw);
    if (contrast > top + 1e-12) top = contrast, best = k;
  }
  return best;
}

}  // namespace

TEST_CASE("day grids") {
  CHECK(day_grid(0, 14, 7) == std::vector<int>{0, 7, 14});
  CHECK(day_grid(0, 13, 7) == std::vector<int>{0, 7});
  CHECK(parse_day_grid("5:20:5") == std::vector<int>{5, 10, 15, 20});
  CHECK(default_day_grid(20) == std::vector<int>{0, 7, 14});
  CHECK_THROWS_AS(parse_day_grid("10"), UsageError);
  CHECK_THROWS_AS(parse_day_grid("0:10:0"), UsageError);
  CHECK_THROWS_AS(parse_day_grid("0:x:1"), UsageError);
  CHECK_THROWS_AS(parse_day_grid("9:1:1"), UsageError);
}

TEST_CASE("zero shapes give an odds ratio of one with a degenerate band") {
  auto e = template_ensemble();
  zero_shapes(e);
  const auto series = biomarker_or_series(e, "lab_step", day_grid(0, 280, 20));
  for (const auto& p : series.points) {
    CHECK(p.odds_ratio == 1.0);
    CHECK(p.lower95 == 1.0);
    CHECK(p.upper95 == 1.0);
  }
}

TEST_CASE("log OR adds main and interaction contrasts") {
  const auto e = template_ensemble();
  const auto& m = e.members.front();
  const auto f = *m.feature_index("lab_step");
  const auto& map = m.bin_maps[f];
  const auto& shape = m.interactions[*m.interaction_index("lab_step")];
  for (int day : {0, 100, 200, 299}) {
    const auto d = shape.day_edges.bin_of(day);
    const double expected = m.mains[f].scores[map.bin_of(1.0)] - m.mains[f].scores[map.bin_of(0.0)] +
                            shape.at(map.bin_of(1.0), d) - shape.at(map.bin_of(0.0), d);
    CHECK(biomarker_log_or(m, "lab_step", day) == doctest::Approx(expected));
  }
  const auto series = biomarker_or_series(e, "lab_step", {150});
  double s = 0.0;
  for (const auto& member : e.members) s += biomarker_log_or(member, "lab_step", 150);
  CHECK(std::log(series.points[0].odds_ratio) == doctest::Approx(s / e.members.size()));
  CHECK(series.points[0].lower95 <= series.points[0].odds_ratio);
  CHECK(series.points[0].odds_ratio <= series.points[0].upper95);
  CHECK_THROWS_AS(biomarker_or_series(e, "age", {0}), DataError);
  CHECK_THROWS_AS(biomarker_or_series(e, "nope", {0}), DataError);
}

TEST_CASE("group series") {
  auto e = template_ensemble();
  const auto days = day_grid(0, 280, 40);
  const auto single = group_or_series(e, {"solo", {"lab_step"}}, days);
  const auto direct = biomarker_or_series(e, "lab_step", days);
  for (std::size_t i = 0; i < days.size(); ++i) {
    CHECK(single.points[i].odds_ratio == direct.points[i].odds_ratio);
    CHECK(single.points[i].lower95 == direct.points[i].lower95);
  }

  zero_shapes(e);
  set_log_or(e, "lab_step", 0.2);
  set_log_or(e, "lab_const", -0.2);
  for (const auto& p : group_or_series(e, {"g1", {"lab_step", "lab_const"}}, days).points) {
    CHECK(p.odds_ratio == doctest::Approx(1.0));
  }
  set_log_or(e, "lab_const", 0.4);
  set_log_or(e, "lab_step", 0.4);
  for (const auto& p : group_or_series(e, {"g1", {"lab_step", "lab_const"}}, days).points) {
    CHECK(p.odds_ratio == doctest::Approx(std::exp(0.4)));
  }
  CHECK_THROWS_AS(group_or_series(e, {"empty", {}}, days), DataError);
}

TEST_CASE("window average is the mean per-bag log OR over the window") {
  const auto e = template_ensemble();
  const BiomarkerGroup group{"g1", {"lab_step", "lab_const"}};
  const auto point = window_average_or(e, group, 100, 200);
  double total = 0.0;
  for (const auto& m : e.members) {
    double s = 0.0;
    for (int d = 100; d < 200; ++d) {
      s += 0.5 * (biomarker_log_or(m, "lab_step", d) + biomarker_log_or(m, "lab_const", d));
    }
    total += s / 100.0;
  }
  CHECK(std::log(point.odds_ratio) == doctest::Approx(total / e.members.size()));
  CHECK_THROWS_AS(window_average_or(e, group, 5, 5), UsageError);
}

TEST_CASE("groups come from binary features in first-appearance order") {
  const auto groups = ensemble_groups(template_ensemble());
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].name == "g1");
  CHECK(groups[0].members == std::vector<std::string>{"lab_step", "lab_const"});
  CHECK(groups[1].members == std::vector<std::string>{"lab_null"});
}

TEST_CASE("threshold of a two-level curve is its boundary bin") {
  std::vector<CurvePoint> curve;
  for (double mid : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) curve.push_back({mid, mid <= 3.0 ? -0.5 : 0.5, 10});
  auto t = select_threshold(curve);
  CHECK(t.threshold == 3.0);
  CHECK(t.direction == RuleDirection::greater_than);
  CHECK(t.contrast == doctest::Approx(1.0));

  for (auto& p : curve) p.score = -p.score;
  t = select_threshold(curve);
  CHECK(t.threshold == 3.0);
  CHECK(t.direction == RuleDirection::less_than);

  CHECK_THROWS_AS(select_threshold({{1.0, 0.0, 1.0}}), DataError);
  CHECK_THROWS_AS(select_threshold({{1.0, 0.3, 1.0}, {2.0, 0.3, 1.0}}), DataError);
}

TEST_CASE("threshold matches exhaustive scan and ignores constant shifts") {
  Rng rng(81);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(30);
    const std::size_t cut = rng.below(n - 1);
    const double lo = rng.normal(), hi = lo + (rng.bernoulli(0.5) ? 1.0 : -1.0) * (0.5 + rng.uniform());
    std::vector<CurvePoint> curve;
    double mid = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
      mid += 0.1 + rng.uniform();
      curve.push_back({mid, (i <= cut ? lo : hi) + 0.01 * rng.normal(), 1.0 + rng.below(50)});
    }
    const auto t = select_threshold(curve);
    CHECK(t.threshold == curve[cut].midpoint);
    CHECK(t.threshold == curve[best_boundary(curve)].midpoint);
    CHECK(t.direction == (hi > lo ? RuleDirection::greater_than : RuleDirection::less_than));

    auto shifted = curve;
    const double c = 10.0 * rng.normal();
    for (auto& p : shifted) p.score += c;
    const auto u = select_threshold(shifted);
    CHECK(u.threshold == t.threshold);
    CHECK(u.direction == t.direction);
  }
}

TEST_CASE("curve from shape drops the missing bin") {
  std::vector<ShapePoint> shape(3);
  shape[0].midpoint = 1.0, shape[0].mean = 0.1, shape[0].count = 5;
  shape[1].midpoint = 2.0, shape[1].mean = 0.2, shape[1].count = 6;
  shape[2].missing_bin = true;
  const auto curve = curve_from_shape(shape);
  REQUIRE(curve.size() == 2);
  CHECK(curve[1].weight == 6.0);
}
