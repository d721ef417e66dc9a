#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "support.hpp"
#include "tvgam/error.hpp"
#include "tvgam/synth.hpp"

using namespace tvgam;

namespace {

EffectSeries series_from_truth(const GroundTruth& truth, const std::string& f,
                               const std::vector<int>& days, double half_width = 0.1) {
  EffectSeries s{f, {}};
  for (int d : days) {
    const double v = truth.log_or(f, d);
    s.points.push_back({d, std::exp(v), std::exp(v - half_width), std::exp(v + half_width)});
  }
  return s;
}

std::string csv_text(const CohortTable& t) {
  std::ostringstream out;
  write_cohort(out, t);
  return out.str();
}

}  // namespace

TEST_CASE("piecewise-linear interpolation, clamping and steps") {
  const PiecewiseLinear f{{0, 10, 10, 20}, {1, 2, 5, 6}};
  CHECK(f(-5) == 1.0);
  CHECK(f(5) == doctest::Approx(1.5));
  CHECK(f(10) == 5.0);
  CHECK(f(9.999) < 2.0);
  CHECK(f(15) == doctest::Approx(5.5));
  CHECK(f(100) == 6.0);
  CHECK(PiecewiseLinear::constant(0.3)(1e9) == 0.3);
  CHECK(PiecewiseLinear::constant(0.3).is_constant());
  CHECK_FALSE(f.is_constant());
  CHECK_THROWS_AS((PiecewiseLinear{{1, 0}, {0, 0}}.validate("bad")), DataError);
  CHECK_THROWS_AS((PiecewiseLinear{{0, 1}, {0}}.validate("bad")), DataError);
}

TEST_CASE("ground truth JSON round-trip and lookups") {
  const auto truth = testing::small_truth();
  CHECK(ground_truth_from_json(to_json(truth)) == truth);
  CHECK(truth.log_or("lab_step", 100) == doctest::Approx(-0.4));
  CHECK(truth.log_or("lab_step", 150) == doctest::Approx(0.6));
  CHECK(truth.log_or("lab_const", 10) == doctest::Approx(0.5));
  CHECK_THROWS_AS(truth.feature("nope"), DataError);
  CHECK_THROWS_AS(truth.log_or("age", 0), DataError);
  const auto nyc = nyc_like_truth();
  CHECK(ground_truth_from_json(to_json(nyc)) == nyc);
  CHECK(nyc.log_or(kStepBiomarker, 40) == doctest::Approx(-0.3));
  CHECK(nyc.log_or(kStepBiomarker, 60) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ground_truth_from_json(nlohmann::json::parse(R"({"features": []})")), DataError);
}

TEST_CASE("generation is deterministic per seed") {
  const auto truth = testing::small_truth();
  const auto a = csv_text(generate_cohort(truth, 3000, 5));
  CHECK(a == csv_text(generate_cohort(truth, 3000, 5)));
  CHECK(a != csv_text(generate_cohort(truth, 3000, 6)));
  CHECK_THROWS_AS(generate_cohort(truth, 0, 1), UsageError);
}

TEST_CASE("null truth reproduces its base rate") {
  const auto truth = ground_truth_from_json(nlohmann::json::parse(R"({
    "intercept": -1.0986122886681098,
    "day_segments": [{"lo": 0, "hi": 10, "weight": 1}],
    "features": [{"name": "z", "kind": "binary", "role": "lab",
                  "distribution": {"type": "bernoulli", "p": 0.5}}]})"));
  const auto t = generate_cohort(truth, 100000, 3);
  double deaths = 0.0;
  for (std::size_t r = 0; r < t.rows(); ++r) deaths += t.outcome(r);
  CHECK(std::abs(deaths / t.rows() - 0.25) < 0.005);
}

TEST_CASE("outcome rate matches the mean true probability") {
  const auto truth = testing::small_truth();
  const auto t = generate_cohort(truth, 20000, 9);
  // Missing cells hide the values the outcome was drawn from, so only the
  // aggregate is checked: 3 binomial SEs around the truth's own rate.
  const auto big = generate_cohort(truth, 200000, 10);
  double p_big = 0.0, p = 0.0;
  for (std::size_t r = 0; r < big.rows(); ++r) p_big += big.outcome(r);
  for (std::size_t r = 0; r < t.rows(); ++r) p += t.outcome(r);
  p_big /= big.rows();
  p /= t.rows();
  CHECK(std::abs(p - p_big) < 3.0 * std::sqrt(p_big * (1 - p_big) / t.rows()) + 0.002);
}

TEST_CASE("missingness does not depend on the outcome") {
  const auto t = generate_cohort(testing::small_truth(), 40000, 11);
  const auto bmi = t.column("bmi");
  double md = 0, nd = 0, ma = 0, na = 0;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const bool miss = is_missing(bmi[r]);
    if (t.outcome(r)) md += miss, nd += 1;
    else ma += miss, na += 1;
  }
  const double pd = md / nd, pa = ma / na, pooled = (md + ma) / (nd + na);
  const double se = std::sqrt(pooled * (1 - pooled) * (1 / nd + 1 / na));
  CHECK(std::abs(pd - pa) < 3.0 * se);
  CHECK(pooled == doctest::Approx(0.05).epsilon(0.2));
}

TEST_CASE("nyc-like admissions peak in days 30 to 50") {
  const auto t = generate_cohort(nyc_like_truth(), 20000, 13);
  std::vector<std::size_t> per_ten(60, 0);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto d = static_cast<std::size_t>(t.admission_day(r)) / 10;
    if (d < per_ten.size()) ++per_ten[d];
  }
  const auto peak = std::max_element(per_ten.begin(), per_ten.end()) - per_ten.begin();
  CHECK(peak >= 3);
  CHECK(peak <= 4);
}

TEST_CASE("recovery of the truth itself is exact") {
  const auto truth = testing::small_truth();
  const auto days = std::vector<int>{0, 50, 100, 140, 160, 200, 290};
  const auto e = recovery_error(series_from_truth(truth, "lab_step", days), truth, "lab_step");
  CHECK(e.max_abs_error < 1e-12);
  CHECK(e.estimated_changepoint == 160);
  CHECK(e.true_changepoint == 160);
  CHECK(e.coverage == 1.0);
  CHECK(e.max_successive_diff == doctest::Approx(1.0));

  const auto flat = recovery_error(series_from_truth(truth, "lab_const", days), truth, "lab_const");
  CHECK(flat.max_successive_diff < 0.1);

  const BiomarkerGroup g1{"g1", {"lab_step", "lab_const"}};
  EffectSeries shifted = series_from_truth(truth, "lab_step", days);
  for (std::size_t i = 0; i < days.size(); ++i) {
    const double v = 0.5 * (truth.log_or("lab_step", days[i]) + truth.log_or("lab_const", days[i]));
    shifted.points[i].odds_ratio = std::exp(v + 0.2);
    shifted.points[i].lower95 = std::exp(v + 0.1);
    shifted.points[i].upper95 = std::exp(v + 0.3);
  }
  const auto ge = recovery_error(shifted, truth, g1);
  CHECK(ge.max_abs_error == doctest::Approx(0.2));
  CHECK(ge.coverage == 0.0);
  CHECK_THROWS_AS(recovery_error(series_from_truth(truth, "lab_step", {400}), truth, "lab_step"),
                  DataError);
}

TEST_CASE("truth groups and curves") {
  const auto truth = testing::small_truth();
  const auto groups = truth_groups(truth);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].members == std::vector<std::string>{"lab_step", "lab_const"});
  std::ostringstream out;
  write_truth_curves(out, truth, {0, 200});
  const auto text = out.str();
  CHECK(text.rfind("subject,day,log_or,or\n", 0) == 0);
  CHECK(text.find("lab_step,200,0.6,") != std::string::npos);
  CHECK(text.find("lab_null,") == std::string::npos);
  CHECK(text.find("g1,0,") != std::string::npos);
}
