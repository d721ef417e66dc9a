#include "tvgam/effects.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "tvgam/error.hpp"
#include "tvgam/stats.hpp"

namespace tvgam {

std::vector<int> day_grid(int start, int end, int step) {
  if (step <= 0) throw UsageError("day grid step must be positive");
  if (end < start) throw UsageError("day grid end precedes start");
  std::vector<int> days;
  for (long d = start; d <= end; d += step) days.push_back(static_cast<int>(d));
  return days;
}

std::vector<int> parse_day_grid(std::string_view spec) {
  int parts[3] = {0, 0, 0};
  std::size_t count = 0;
  while (count < 3) {
    const auto colon = spec.find(':');
    const auto token = spec.substr(0, colon);
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), parts[count]);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw UsageError("day grid must look like start:end:step, got '" + std::string(spec) + "'");
    }
    ++count;
    if (colon == std::string_view::npos) break;
    spec.remove_prefix(colon + 1);
  }
  if (count != 3) throw UsageError("day grid must look like start:end:step");
  return day_grid(parts[0], parts[1], parts[2]);
}

std::vector<int> default_day_grid(int max_day) { return day_grid(0, std::max(0, max_day), 7); }

namespace {

void check_biomarker(const BagEnsemble& ensemble, std::string_view biomarker) {
  if (ensemble.members.empty()) throw DataError("empty ensemble");
  for (const auto& m : ensemble.members) {
    if (!m.feature_index(biomarker)) {
      throw DataError("unknown biomarker '" + std::string(biomarker) + "'");
    }
    if (!m.interaction_index(biomarker)) {
      throw DataError("biomarker '" + std::string(biomarker) + "' has no day interaction");
    }
  }
  if (const auto* spec = ensemble.spec(biomarker); spec && spec->kind != FeatureKind::binary) {
    throw DataError("biomarker '" + std::string(biomarker) + "' is not binary");
  }
}

EffectPoint summarize(int day, std::span<const double> log_ors, double spread_scale) {
  const Band band = bag_band(log_ors, spread_scale);
  return {day, std::exp(band.mean), std::exp(band.lower), std::exp(band.upper)};
}

// Per-bag mean over group members of the log OR at `day`.
void group_replicates(const BagEnsemble& ensemble, const BiomarkerGroup& group, int day,
                      std::vector<double>& out) {
  out.assign(ensemble.members.size(), 0.0);
  for (std::size_t m = 0; m < ensemble.members.size(); ++m) {
    double sum = 0.0;
    for (const auto& name : group.members) sum += biomarker_log_or(ensemble.members[m], name, day);
    out[m] = sum / static_cast<double>(group.members.size());
  }
}

}  // namespace

double biomarker_log_or(const GamModel& model, std::string_view biomarker, int day) {
  const auto f = model.feature_index(biomarker);
  if (!f) throw DataError("unknown biomarker '" + std::string(biomarker) + "'");
  const auto& map = model.bin_maps[*f];
  const auto on = map.bin_of(1.0);
  const auto off = map.bin_of(0.0);
  const auto& scores = model.mains[*f].scores;
  double delta = scores[on] - scores[off];
  if (auto i = model.interaction_index(biomarker)) {
    const auto& shape = model.interactions[*i];
    const auto d = shape.day_edges.bin_of(day);
    delta += shape.at(on, d) - shape.at(off, d);
  }
  return delta;
}

EffectSeries biomarker_or_series(const BagEnsemble& ensemble, std::string_view biomarker,
                                 const std::vector<int>& days) {
  check_biomarker(ensemble, biomarker);
  return group_or_series(ensemble, {std::string(biomarker), {std::string(biomarker)}}, days);
}

EffectSeries group_or_series(const BagEnsemble& ensemble, const BiomarkerGroup& group,
                             const std::vector<int>& days) {
  if (group.members.empty()) throw DataError("biomarker group '" + group.name + "' is empty");
  for (const auto& name : group.members) check_biomarker(ensemble, name);
  EffectSeries series{group.name, {}};
  std::vector<double> replicates;
  for (int day : days) {
    group_replicates(ensemble, group, day, replicates);
    series.points.push_back(summarize(day, replicates, ensemble.spread_scale()));
  }
  return series;
}

EffectPoint window_average_or(const BagEnsemble& ensemble, const BiomarkerGroup& group,
                              int day_lo, int day_hi) {
  if (group.members.empty()) throw DataError("biomarker group '" + group.name + "' is empty");
  if (day_hi <= day_lo) throw UsageError("empty day window");
  for (const auto& name : group.members) check_biomarker(ensemble, name);
  std::vector<double> totals(ensemble.members.size(), 0.0);
  std::vector<double> replicates;
  for (int day = day_lo; day < day_hi; ++day) {
    group_replicates(ensemble, group, day, replicates);
    for (std::size_t m = 0; m < totals.size(); ++m) totals[m] += replicates[m];
  }
  for (auto& t : totals) t /= static_cast<double>(day_hi - day_lo);
  return summarize(day_lo, totals, ensemble.spread_scale());
}

std::vector<BiomarkerGroup> ensemble_groups(const BagEnsemble& ensemble) {
  std::vector<BiomarkerGroup> groups;
  for (const auto& spec : ensemble.feature_specs) {
    if (spec.group.empty() || spec.kind != FeatureKind::binary) continue;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const BiomarkerGroup& g) { return g.name == spec.group; });
    if (it == groups.end()) {
      groups.push_back({spec.group, {}});
      it = groups.end() - 1;
    }
    it->members.push_back(spec.name);
  }
  return groups;
}

Threshold select_threshold(std::vector<CurvePoint> curve) {
  if (curve.size() < 2) throw DataError("threshold selection needs at least two bins");
  std::stable_sort(curve.begin(), curve.end(),
                   [](const CurvePoint& a, const CurvePoint& b) { return a.midpoint < b.midpoint; });
  const std::size_t n = curve.size();

  double total_w = 0.0;
  double weighted = 0.0;
  double lo = curve.front().score;
  double hi = lo;
  for (const auto& p : curve) {
    if (!(p.weight >= 0.0) || !std::isfinite(p.score)) {
      throw DataError("threshold curve has a negative weight or non-finite score");
    }
    total_w += p.weight;
    weighted += p.weight * p.score;
    lo = std::min(lo, p.score);
    hi = std::max(hi, p.score);
  }
  if (!(total_w > 0.0)) throw DataError("threshold curve has zero total weight");
  if (hi - lo <= 1e-12 * (1.0 + std::max(std::abs(lo), std::abs(hi)))) {
    throw DataError("constant curve: no threshold separates high and low risk");
  }
  const double centre = weighted / total_w;
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = curve[i].score - centre;

  // Signed contrast mean(right) - mean(left) for the cut after bin k.
  std::vector<double> contrast(n - 1, 0.0);
  std::vector<bool> valid(n - 1, false);
  double left_w = 0.0;
  double left_s = 0.0;
  double right_s_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) right_s_total += curve[i].weight * c[i];
  double best = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    left_w += curve[k].weight;
    left_s += curve[k].weight * c[k];
    const double right_w = total_w - left_w;
    if (left_w <= 0.0 || right_w <= 0.0) continue;
    contrast[k] = (right_s_total - left_s) / right_w - left_s / left_w;
    valid[k] = true;
    best = std::max(best, std::abs(contrast[k]));
  }
  if (!(best > 0.0)) throw DataError("no bin boundary separates the curve");

  // Zero crossing of the centered curve with the largest jump.
  double crossing = curve[n / 2].midpoint;
  double jump = -1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (c[i] * c[i + 1] <= 0.0 && c[i] != c[i + 1]) {
      const double size = std::abs(c[i + 1] - c[i]);
      if (size > jump) {
        jump = size;
        const double t = c[i] / (c[i] - c[i + 1]);
        crossing = curve[i].midpoint + t * (curve[i + 1].midpoint - curve[i].midpoint);
      }
    }
  }

  std::size_t chosen = n;
  double chosen_dist = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (!valid[k] || std::abs(contrast[k]) < best * (1.0 - 1e-9)) continue;
    const double position = 0.5 * (curve[k].midpoint + curve[k + 1].midpoint);
    const double dist = std::abs(position - crossing);
    if (chosen == n || dist < chosen_dist) {
      chosen = k;
      chosen_dist = dist;
    }
  }
  return {curve[chosen].midpoint,
          contrast[chosen] > 0.0 ? RuleDirection::greater_than : RuleDirection::less_than,
          std::abs(contrast[chosen])};
}

std::vector<CurvePoint> curve_from_shape(const std::vector<ShapePoint>& shape) {
  std::vector<CurvePoint> curve;
  for (const auto& p : shape) {
    if (p.missing_bin) continue;
    curve.push_back({p.midpoint, p.mean, static_cast<double>(p.count)});
  }
  return curve;
}

}  // namespace tvgam
