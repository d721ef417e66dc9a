#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tvgam/cohort.hpp"
#include "tvgam/gam.hpp"

namespace tvgam {

struct EffectPoint {
  int day = 0;
  double odds_ratio = 1.0;
  double lower95 = 1.0;
  double upper95 = 1.0;
};

struct EffectSeries {
  std::string subject;
  std::vector<EffectPoint> points;
};

struct BiomarkerGroup {
  std::string name;
  std::vector<std::string> members;
};

// Days start, start + step, ... up to and including end when it lands on the
// grid. Parses "start:end:step".
std::vector<int> day_grid(int start, int end, int step);
std::vector<int> parse_day_grid(std::string_view spec);
// Every 7 days from 0 to max_day.
std::vector<int> default_day_grid(int max_day);

// Log odds ratio of biomarker = 1 versus 0 at `day` for one fitted model:
// [main(1) + inter(1, day)] - [main(0) + inter(0, day)].
double biomarker_log_or(const GamModel& model, std::string_view biomarker, int day);

// Per-day odds ratio with the across-bag mean of the log OR as point estimate
// and the bag band as 95% interval.
EffectSeries biomarker_or_series(const BagEnsemble& ensemble, std::string_view biomarker,
                                 const std::vector<int>& days);

// Same, averaging member log ORs within each day before summarizing across
// bags (geometric-mean OR of the group).
EffectSeries group_or_series(const BagEnsemble& ensemble, const BiomarkerGroup& group,
                             const std::vector<int>& days);

// Averages the per-bag log OR over integer days in [day_lo, day_hi) before
// summarizing across bags.
EffectPoint window_average_or(const BagEnsemble& ensemble, const BiomarkerGroup& group,
                              int day_lo, int day_hi);

// Groups declared through the "group" attribute of the ensemble's binary
// features, in first-appearance order.
std::vector<BiomarkerGroup> ensemble_groups(const BagEnsemble& ensemble);

struct CurvePoint {
  double midpoint = 0.0;
  double score = 0.0;
  double weight = 1.0;
};

struct Threshold {
  double threshold = 0.0;
  RuleDirection direction = RuleDirection::greater_than;
  double contrast = 0.0;
};

// Picks the bin boundary b maximizing |mean(score | bins > b) -
// mean(score | bins <= b)|, sides weighted by row counts. The threshold is the
// midpoint of the last bin on the low side; direction points to the side with
// the higher mean score. Near-ties go to the boundary closest to where the
// mean-centered curve crosses zero. Throws DataError for fewer than two bins
// or a constant curve.
Threshold select_threshold(std::vector<CurvePoint> curve);

// Curve of value bins (missing bin dropped) from a shape summary.
std::vector<CurvePoint> curve_from_shape(const std::vector<ShapePoint>& shape);

}  // namespace tvgam
