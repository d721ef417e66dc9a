#include "boosting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tvgam/error.hpp"
#include "tvgam/logistic.hpp"
#include "tvgam/rng.hpp"

namespace tvgam::detail {

namespace {

constexpr double kMinHessian = 1e-12;

struct Sums {
  double g = 0.0;
  double h = 0.0;
  std::size_t c = 0;

  Sums operator-(const Sums& o) const { return {g - o.g, h - o.h, c - o.c}; }
  Sums operator+(const Sums& o) const { return {g + o.g, h + o.h, c + o.c}; }
};

bool usable(const Sums& s, std::size_t min_samples) {
  return s.c >= min_samples && s.c > 0 && s.h > kMinHessian;
}

// Newton gain term G^2 / H of a leaf.
double leaf_score(const Sums& s) { return s.g * s.g / s.h; }

double leaf_value(const Sums& s, double learning_rate) { return learning_rate * s.g / s.h; }

double mean_loss(std::span<const double> y, std::span<const double> z) {
  if (y.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) total += logistic_loss(y[k], z[k]);
  return total / static_cast<double>(y.size());
}

// Training rows gathered into contiguous arrays.
struct Compact {
  std::vector<std::vector<std::uint16_t>> bins;  // per model feature
  std::vector<std::uint16_t> day;
  std::vector<double> y;
  std::vector<double> z;
};

Compact gather(const BinnedTable& data, std::span<const std::size_t> rows) {
  Compact c;
  c.bins.resize(data.features.size());
  for (std::size_t f = 0; f < data.features.size(); ++f) {
    c.bins[f].reserve(rows.size());
    for (auto r : rows) c.bins[f].push_back(data.features[f][r]);
  }
  if (!data.day.empty()) {
    c.day.reserve(rows.size());
    for (auto r : rows) c.day.push_back(data.day[r]);
  }
  c.y.reserve(rows.size());
  for (auto r : rows) c.y.push_back(data.y[r]);
  return c;
}

// Current logits of gathered rows under the model.
void compute_logits(const GamModel& model, const std::vector<std::size_t>& inter_feature,
                    Compact& c) {
  c.z.assign(c.y.size(), model.intercept);
  for (std::size_t f = 0; f < model.mains.size(); ++f) {
    const auto& scores = model.mains[f].scores;
    const auto& bins = c.bins[f];
    for (std::size_t k = 0; k < c.z.size(); ++k) c.z[k] += scores[bins[k]];
  }
  for (std::size_t i = 0; i < model.interactions.size(); ++i) {
    const auto& shape = model.interactions[i];
    const auto& bins = c.bins[inter_feature[i]];
    for (std::size_t k = 0; k < c.z.size(); ++k) c.z[k] += shape.at(bins[k], c.day[k]);
  }
}

// Tracks held-out loss and decides when to stop; keeps the best snapshot.
template <typename Snapshot>
class EarlyStopper {
 public:
  EarlyStopper(std::size_t patience, bool enabled, double initial_loss, Snapshot initial)
      : patience_(patience), enabled_(enabled), best_loss_(initial_loss),
        best_(std::move(initial)) {}

  // Returns true when boosting should stop.
  bool observe(double loss, std::size_t round, const Snapshot& current) {
    if (!enabled_) {
      best_round_ = round + 1;
      return false;
    }
    if (loss < best_loss_) {
      best_loss_ = loss;
      best_ = current;
      best_round_ = round + 1;
      stale_ = 0;
      return false;
    }
    return ++stale_ >= patience_;
  }

  bool enabled() const { return enabled_; }
  const Snapshot& best() const { return best_; }
  std::size_t best_round() const { return best_round_; }

 private:
  std::size_t patience_;
  bool enabled_;
  double best_loss_;
  Snapshot best_;
  std::size_t best_round_ = 0;
  std::size_t stale_ = 0;
};

std::vector<std::size_t> interaction_feature_indices(const GamModel& model) {
  std::vector<std::size_t> idx;
  for (const auto& shape : model.interactions) {
    auto f = model.feature_index(shape.feature);
    if (!f) throw DataError("interaction feature '" + shape.feature + "' lacks a main effect");
    idx.push_back(*f);
  }
  return idx;
}

}  // namespace

BinnedTable bin_table(const GamModel& model, const BinMap* day_map, const CohortTable& table) {
  BinnedTable out;
  const auto n = table.rows();
  out.features.resize(model.features.size());
  for (std::size_t f = 0; f < model.features.size(); ++f) {
    const auto col = table.column(model.features[f]);
    const auto& map = model.bin_maps[f];
    auto& bins = out.features[f];
    bins.resize(n);
    for (std::size_t r = 0; r < n; ++r) bins[r] = static_cast<std::uint16_t>(map.bin_of(col[r]));
  }
  if (day_map) {
    const auto col = table.column(table.schema().day_index());
    out.day.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      out.day[r] = static_cast<std::uint16_t>(day_map->bin_of(col[r]));
    }
  }
  const auto outcome = table.column(table.schema().outcome_index());
  out.y.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (is_missing(outcome[r])) {
      throw DataError("outcome missing for patient '" + table.patient_id(r) + "'");
    }
    out.y[r] = static_cast<std::uint8_t>(outcome[r]);
  }
  return out;
}

Split stratified_split(std::span<const std::size_t> rows, const std::vector<std::uint8_t>& y,
                       double fraction, std::uint64_t seed) {
  std::vector<std::size_t> classes[2];
  for (auto r : rows) classes[y[r]].push_back(r);
  Rng rng(seed);
  Split split;
  for (auto& members : classes) {
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.below(i)]);
    }
    const auto held =
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
    split.valid.insert(split.valid.end(), members.begin(), members.begin() + held);
    split.train.insert(split.train.end(), members.begin() + held, members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.valid.begin(), split.valid.end());
  return split;
}

void require_both_classes(std::span<const std::size_t> rows, const std::vector<std::uint8_t>& y,
                          const char* what) {
  std::size_t pos = 0;
  for (auto r : rows) pos += y[r];
  if (pos == 0 || pos == rows.size()) {
    throw DataError(std::string(what) + " contains a single outcome class");
  }
}

double base_rate_logit(std::span<const std::size_t> rows, const std::vector<std::uint8_t>& y) {
  std::size_t pos = 0;
  for (auto r : rows) pos += y[r];
  return logit(static_cast<double>(pos) / static_cast<double>(rows.size()));
}

std::vector<double> fit_tree_1d(std::span<const double> grad, std::span<const double> hess,
                                std::span<const std::size_t> count, std::size_t value_bins,
                                const GamConfig& cfg) {
  std::vector<double> update(grad.size(), 0.0);

  std::vector<Sums> prefix(value_bins + 1);
  for (std::size_t b = 0; b < value_bins; ++b) {
    prefix[b + 1] = prefix[b] + Sums{grad[b], hess[b], count[b]};
  }
  auto range = [&](std::size_t a, std::size_t b) { return prefix[b] - prefix[a]; };

  struct Segment {
    std::size_t begin, end;
  };
  std::vector<Segment> leaves{{0, value_bins}};
  while (leaves.size() < cfg.max_leaves_main) {
    double best_gain = 0.0;
    std::size_t best_leaf = 0;
    std::size_t best_cut = 0;
    for (std::size_t l = 0; l < leaves.size(); ++l) {
      const auto [a, b] = leaves[l];
      const Sums whole = range(a, b);
      if (!usable(whole, 1)) continue;
      const double parent = leaf_score(whole);
      for (std::size_t s = a + 1; s < b; ++s) {
        const Sums left = range(a, s);
        const Sums right = whole - left;
        if (!usable(left, cfg.min_samples_leaf) || !usable(right, cfg.min_samples_leaf)) continue;
        const double gain = leaf_score(left) + leaf_score(right) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_leaf = l;
          best_cut = s;
        }
      }
    }
    if (best_gain <= 0.0) break;
    const Segment old = leaves[best_leaf];
    leaves[best_leaf] = {old.begin, best_cut};
    leaves.insert(leaves.begin() + static_cast<std::ptrdiff_t>(best_leaf) + 1, {best_cut, old.end});
  }

  if (leaves.size() > 1) {
    for (const auto& [a, b] : leaves) {
      const Sums s = range(a, b);
      const double v = leaf_value(s, cfg.learning_rate);
      for (std::size_t bin = a; bin < b; ++bin) update[bin] = v;
    }
  }
  const std::size_t miss = value_bins;
  if (miss < grad.size()) {
    const Sums s{grad[miss], hess[miss], count[miss]};
    if (usable(s, cfg.min_samples_leaf)) update[miss] = leaf_value(s, cfg.learning_rate);
  }
  return update;
}

std::vector<double> fit_tree_2d(std::span<const double> grad, std::span<const double> hess,
                                std::span<const std::size_t> count, std::size_t rows,
                                std::size_t cols, const GamConfig& cfg) {
  std::vector<double> update(rows * cols, 0.0);
  const std::size_t cells = cfg.max_cells_interaction;
  if (cells < 2 || rows * cols < 2) return update;

  // prefix[(i)*(cols+1)+j] = sums over cells [0,i) x [0,j).
  const std::size_t stride = cols + 1;
  std::vector<Sums> prefix((rows + 1) * stride);
  for (std::size_t i = 0; i < rows; ++i) {
    Sums run;
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t cell = i * cols + j;
      run = run + Sums{grad[cell], hess[cell], count[cell]};
      prefix[(i + 1) * stride + j + 1] = prefix[i * stride + j + 1] + run;
    }
  }
  auto rect = [&](std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) {
    return prefix[r1 * stride + c1] - prefix[r0 * stride + c1] - prefix[r1 * stride + c0] +
           prefix[r0 * stride + c0];
  };

  struct Rect {
    std::size_t r0, r1, c0, c1;
  };
  const Sums root = rect(0, rows, 0, cols);
  if (!usable(root, 1)) return update;
  const double root_score = leaf_score(root);

  // Best single cut of a region along the secondary axis; returns improvement
  // over leaving it whole and the chosen sub-rectangles.
  auto best_secondary = [&](Rect region, bool cut_columns, std::vector<Rect>& parts) -> double {
    const Sums whole = rect(region.r0, region.r1, region.c0, region.c1);
    const double base = leaf_score(whole);
    double best = 0.0;
    const std::size_t lo = cut_columns ? region.c0 : region.r0;
    const std::size_t hi = cut_columns ? region.c1 : region.r1;
    std::size_t best_cut = 0;
    for (std::size_t s = lo + 1; s < hi; ++s) {
      const Sums a = cut_columns ? rect(region.r0, region.r1, region.c0, s)
                                 : rect(region.r0, s, region.c0, region.c1);
      const Sums b = whole - a;
      if (!usable(a, cfg.min_samples_leaf) || !usable(b, cfg.min_samples_leaf)) continue;
      const double gain = leaf_score(a) + leaf_score(b) - base;
      if (gain > best) {
        best = gain;
        best_cut = s;
      }
    }
    parts.clear();
    if (best_cut == 0) {
      parts.push_back(region);
    } else if (cut_columns) {
      parts.push_back({region.r0, region.r1, region.c0, best_cut});
      parts.push_back({region.r0, region.r1, best_cut, region.c1});
    } else {
      parts.push_back({region.r0, best_cut, region.c0, region.c1});
      parts.push_back({best_cut, region.r1, region.c0, region.c1});
    }
    return best;
  };

  double best_total = 0.0;
  std::vector<Rect> best_leaves;
  std::vector<Rect> first_parts, second_parts;
  for (bool primary_rows : {true, false}) {
    const std::size_t extent = primary_rows ? rows : cols;
    for (std::size_t cut = 1; cut < extent; ++cut) {
      const Rect first = primary_rows ? Rect{0, cut, 0, cols} : Rect{0, rows, 0, cut};
      const Rect second = primary_rows ? Rect{cut, rows, 0, cols} : Rect{0, rows, cut, cols};
      const Sums a = rect(first.r0, first.r1, first.c0, first.c1);
      const Sums b = root - a;
      if (!usable(a, cfg.min_samples_leaf) || !usable(b, cfg.min_samples_leaf)) continue;
      double total = leaf_score(a) + leaf_score(b) - root_score;
      std::vector<Rect> leaves;
      if (cells >= 3) {
        const double ga = best_secondary(first, primary_rows, first_parts);
        const double gb = best_secondary(second, primary_rows, second_parts);
        if (cells >= 4) {
          total += ga + gb;
          leaves = first_parts;
          leaves.insert(leaves.end(), second_parts.begin(), second_parts.end());
        } else if (ga >= gb) {
          total += ga;
          leaves = first_parts;
          leaves.push_back(second);
        } else {
          total += gb;
          leaves = {first};
          leaves.insert(leaves.end(), second_parts.begin(), second_parts.end());
        }
      } else {
        leaves = {first, second};
      }
      if (total > best_total) {
        best_total = total;
        best_leaves = std::move(leaves);
      }
    }
  }
  if (best_total <= 0.0) return update;

  for (const auto& leaf : best_leaves) {
    const Sums s = rect(leaf.r0, leaf.r1, leaf.c0, leaf.c1);
    if (!usable(s, 1)) continue;
    const double v = leaf_value(s, cfg.learning_rate);
    for (std::size_t i = leaf.r0; i < leaf.r1; ++i) {
      for (std::size_t j = leaf.c0; j < leaf.c1; ++j) update[i * cols + j] = v;
    }
  }
  return update;
}

void boost_mains(GamModel& model, const BinnedTable& data, const Split& split,
                 const GamConfig& cfg, FitTrace* trace) {
  const std::vector<std::size_t> inter = interaction_feature_indices(model);
  Compact train = gather(data, split.train);
  Compact valid = gather(data, split.valid);
  compute_logits(model, inter, train);
  compute_logits(model, inter, valid);

  using Snapshot = std::vector<ShapeMain>;
  EarlyStopper<Snapshot> stopper(cfg.early_stop_patience, !valid.y.empty(),
                                 mean_loss(valid.y, valid.z), model.mains);

  std::vector<double> grad, hess;
  std::vector<std::size_t> count;
  for (std::size_t round = 0; round < cfg.boosting_rounds_main; ++round) {
    for (std::size_t f = 0; f < model.mains.size(); ++f) {
      const auto& map = model.bin_maps[f];
      const std::size_t nb = map.bin_count();
      grad.assign(nb, 0.0);
      hess.assign(nb, 0.0);
      count.assign(nb, 0);
      const auto& bins = train.bins[f];
      for (std::size_t k = 0; k < train.y.size(); ++k) {
        const double p = sigmoid(train.z[k]);
        const auto b = bins[k];
        grad[b] += train.y[k] - p;
        hess[b] += p * (1.0 - p);
        ++count[b];
      }
      const auto update = fit_tree_1d(grad, hess, count, map.value_bins(), cfg);
      if (std::all_of(update.begin(), update.end(), [](double u) { return u == 0.0; })) continue;
      auto& scores = model.mains[f].scores;
      for (std::size_t b = 0; b < nb; ++b) scores[b] += update[b];
      for (std::size_t k = 0; k < train.z.size(); ++k) train.z[k] += update[bins[k]];
      const auto& vbins = valid.bins[f];
      for (std::size_t k = 0; k < valid.z.size(); ++k) valid.z[k] += update[vbins[k]];
    }
    if (trace) trace->main_train_loss.push_back(mean_loss(train.y, train.z));
    const double vloss = stopper.enabled() ? mean_loss(valid.y, valid.z) : 0.0;
    if (trace && stopper.enabled()) trace->main_valid_loss.push_back(vloss);
    if (stopper.observe(vloss, round, model.mains)) break;
  }
  if (stopper.enabled()) model.mains = stopper.best();
  if (trace) trace->main_rounds_kept = stopper.best_round();
}

std::vector<std::size_t> boost_interactions(GamModel& model, const BinnedTable& data,
                                            const Split& split, const GamConfig& cfg,
                                            FitTrace* trace,
                                            std::span<const std::size_t> fixed_rounds) {
  if (model.interactions.empty()) return {};
  const bool fixed = !fixed_rounds.empty();
  if (fixed && fixed_rounds.size() != model.interactions.size()) {
    throw UsageError("fixed interaction rounds must list every interaction");
  }
  const std::vector<std::size_t> inter = interaction_feature_indices(model);
  Compact train = gather(data, split.train);
  Compact valid = gather(data, split.valid);
  compute_logits(model, inter, train);
  compute_logits(model, inter, valid);

  // Each term stops on its own cumulative held-out loss change. A single
  // stopping point for all terms lets null interactions fitting noise cut
  // short the terms that carry signal.
  struct TermState {
    double cumulative = 0.0;
    double best = 0.0;
    std::vector<double> best_grid;
    std::size_t best_round = 0;
    std::size_t stale = 0;
    bool active = true;
  };
  const bool stopping = !fixed && !valid.y.empty();
  // Gains below this share of the held-out loss are treated as noise.
  const double min_gain = stopping ? cfg.early_stop_tolerance * mean_loss(valid.y, valid.z) *
                                         static_cast<double>(valid.y.size())
                                   : 0.0;
  std::vector<TermState> state(model.interactions.size());
  if (fixed) {
    for (std::size_t i = 0; i < state.size(); ++i) state[i].active = fixed_rounds[i] > 0;
  }
  for (std::size_t i = 0; i < state.size(); ++i) state[i].best_grid = model.interactions[i].grid;

  std::vector<double> grad, hess;
  std::vector<std::size_t> count;
  std::size_t rounds_run = 0;
  for (std::size_t round = 0; round < cfg.boosting_rounds_interaction; ++round) {
    bool any_active = false;
    for (std::size_t i = 0; i < model.interactions.size(); ++i) {
      auto& st = state[i];
      if (!st.active) continue;
      any_active = true;
      auto& shape = model.interactions[i];
      const std::size_t nr = shape.feature_bins;
      const std::size_t nc = shape.day_bins();
      grad.assign(nr * nc, 0.0);
      hess.assign(nr * nc, 0.0);
      count.assign(nr * nc, 0);
      const auto& bins = train.bins[inter[i]];
      for (std::size_t k = 0; k < train.y.size(); ++k) {
        const double p = sigmoid(train.z[k]);
        const std::size_t cell = bins[k] * nc + train.day[k];
        grad[cell] += train.y[k] - p;
        hess[cell] += p * (1.0 - p);
        ++count[cell];
      }
      const auto update = fit_tree_2d(grad, hess, count, nr, nc, cfg);
      double delta = 0.0;
      if (!std::all_of(update.begin(), update.end(), [](double u) { return u == 0.0; })) {
        for (std::size_t c = 0; c < update.size(); ++c) shape.grid[c] += update[c];
        for (std::size_t k = 0; k < train.z.size(); ++k) {
          train.z[k] += update[bins[k] * nc + train.day[k]];
        }
        const auto& vbins = valid.bins[inter[i]];
        for (std::size_t k = 0; k < valid.z.size(); ++k) {
          const double before = valid.z[k];
          valid.z[k] += update[vbins[k] * nc + valid.day[k]];
          delta += logistic_loss(valid.y[k], valid.z[k]) - logistic_loss(valid.y[k], before);
        }
      }
      if (!stopping) {
        st.best_round = round + 1;
        if (fixed && st.best_round >= fixed_rounds[i]) st.active = false;
        continue;
      }
      st.cumulative += delta;
      if (st.cumulative < st.best - min_gain) {
        st.best = st.cumulative;
        st.best_grid = shape.grid;
        st.best_round = round + 1;
        st.stale = 0;
      } else if (++st.stale >= cfg.early_stop_patience) {
        st.active = false;
      }
    }
    if (!any_active) break;
    rounds_run = round + 1;
    if (trace) trace->interaction_train_loss.push_back(mean_loss(train.y, train.z));
    if (trace && stopping) trace->interaction_valid_loss.push_back(mean_loss(valid.y, valid.z));
  }
  std::size_t kept = stopping ? 0 : rounds_run;
  std::vector<std::size_t> term_rounds(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (stopping) {
      model.interactions[i].grid = state[i].best_grid;
      kept = std::max(kept, state[i].best_round);
    }
    term_rounds[i] = state[i].best_round;
  }
  if (trace) {
    trace->interaction_rounds_kept = kept;
    trace->interaction_term_rounds = term_rounds;
  }
  return term_rounds;
}

void center(GamModel& model, const BinnedTable& data) {
  const auto n = static_cast<double>(data.rows());
  if (data.rows() == 0) return;
  for (std::size_t f = 0; f < model.mains.size(); ++f) {
    auto& scores = model.mains[f].scores;
    double sum = 0.0;
    for (auto b : data.features[f]) sum += scores[b];
    const double shift = sum / n;
    for (auto& s : scores) s -= shift;
    model.intercept += shift;
  }
  const auto inter = interaction_feature_indices(model);
  for (std::size_t i = 0; i < model.interactions.size(); ++i) {
    auto& shape = model.interactions[i];
    const auto& bins = data.features[inter[i]];
    double sum = 0.0;
    for (std::size_t r = 0; r < data.rows(); ++r) sum += shape.at(bins[r], data.day[r]);
    const double shift = sum / n;
    for (auto& g : shape.grid) g -= shift;
    model.intercept += shift;
  }
}

}  // namespace tvgam::detail
