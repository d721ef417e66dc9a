#include "tvgam/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "tvgam/csv.hpp"
#include "tvgam/logistic.hpp"

namespace tvgam {

namespace {

using csv::format_double;

nlohmann::json cell_json(const OrCell& c) {
  nlohmann::json j = {{"available", c.available}};
  if (c.available || !c.note.empty()) {
    j["or"] = c.odds_ratio;
    j["lower95"] = c.lower95;
    j["upper95"] = c.upper95;
  }
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

void append_cell(std::vector<std::string>& row, const OrCell& c) {
  if (!c.available) {
    row.insert(row.end(), {"", "", ""});
    return;
  }
  row.push_back(format_double(c.odds_ratio));
  row.push_back(format_double(c.lower95));
  row.push_back(format_double(c.upper95));
}

std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

void write_effects_csv(std::ostream& out, const std::vector<EffectSeries>& series) {
  csv::write_row(out, {"subject", "day", "or", "lower95", "upper95"});
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      csv::write_row(out, {s.subject, std::to_string(p.day), format_double(p.odds_ratio),
                           format_double(p.lower95), format_double(p.upper95)});
    }
  }
}

nlohmann::json effects_json(const std::vector<EffectSeries>& series) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : series) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : s.points) {
      pts.push_back({{"day", p.day}, {"or", p.odds_ratio}, {"lower95", p.lower95},
                     {"upper95", p.upper95}});
    }
    arr.push_back({{"subject", s.subject}, {"points", std::move(pts)}});
  }
  return {{"series", std::move(arr)}};
}

void write_effects_svg(std::ostream& out, const std::vector<EffectSeries>& series,
                       const std::string& title) {
  constexpr double width = 720, height = 420, left = 70, right = 170, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  int day_lo = 0;
  int day_hi = 1;
  double lo = 0.0;  // log OR range, always including 0
  double hi = 0.0;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      if (first) {
        day_lo = day_hi = p.day;
        first = false;
      }
      day_lo = std::min(day_lo, p.day);
      day_hi = std::max(day_hi, p.day);
      lo = std::min(lo, std::log(p.lower95));
      hi = std::max(hi, std::log(p.upper95));
    }
  }
  if (day_hi == day_lo) day_hi = day_lo + 1;
  const double pad = 0.05 * std::max(hi - lo, 0.1);
  lo -= pad;
  hi += pad;
  auto px = [&](double day) { return left + (day - day_lo) / (day_hi - day_lo) * plot_w; };
  auto py = [&](double odds) { return top + (hi - std::log(odds)) / (hi - lo) * plot_h; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">" << xml_escape(title)
      << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";

  for (double odds : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0}) {
    const double l = std::log(odds);
    if (l < lo || l > hi) continue;
    const auto y = svg_number(py(odds));
    out << "<line x1=\"" << left << "\" x2=\"" << left + plot_w << "\" y1=\"" << y << "\" y2=\""
        << y << "\" stroke=\"" << (odds == 1.0 ? "#000" : "#ddd")
        << "\" stroke-dasharray=\"" << (odds == 1.0 ? "4 3" : "none") << "\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << y
        << "\" text-anchor=\"end\" dominant-baseline=\"middle\">" << odds << "</text>\n";
  }
  const int span = day_hi - day_lo;
  const int tick = span > 300 ? 100 : span > 100 ? 50 : span > 30 ? 10 : 5;
  for (int d = (day_lo + tick - 1) / tick * tick; d <= day_hi; d += tick) {
    const auto x = svg_number(px(d));
    out << "<line x1=\"" << x << "\" x2=\"" << x << "\" y1=\"" << top + plot_h << "\" y2=\""
        << top + plot_h + 5 << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
        << d << "</text>\n";
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\">Admission day</text>\n";
  out << "<text transform=\"translate(18," << top + plot_h / 2
      << ") rotate(-90)\" text-anchor=\"middle\">Odds ratio (95% CI)</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % kPalette.size()];
    if (s.points.empty()) continue;
    out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (const auto& p : s.points) out << svg_number(px(p.day)) << ',' << svg_number(py(p.upper95)) << ' ';
    for (auto it = s.points.rbegin(); it != s.points.rend(); ++it) {
      out << svg_number(px(it->day)) << ',' << svg_number(py(it->lower95)) << ' ';
    }
    out << "\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : s.points) out << svg_number(px(p.day)) << ',' << svg_number(py(p.odds_ratio)) << ' ';
    out << "\"/>\n";
    const double ly = top + 12 + 18.0 * static_cast<double>(i);
    out << "<line x1=\"" << left + plot_w + 12 << "\" x2=\"" << left + plot_w + 32 << "\" y1=\""
        << ly << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
    out << "<text x=\"" << left + plot_w + 38 << "\" y=\"" << ly
        << "\" dominant-baseline=\"middle\">" << xml_escape(s.subject) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_shape_csv(std::ostream& out, const std::string& feature,
                     const std::vector<ShapePoint>& shape) {
  csv::write_row(out, {"feature", "bin", "missing_bin", "lower_edge", "upper_edge", "midpoint",
                       "count", "score", "lower95", "upper95"});
  for (const auto& p : shape) {
    csv::write_row(out, {feature, std::to_string(p.bin), p.missing_bin ? "1" : "0",
                         p.missing_bin ? "" : format_double(p.lower_edge),
                         p.missing_bin ? "" : format_double(p.upper_edge),
                         p.missing_bin ? "" : format_double(p.midpoint), std::to_string(p.count),
                         format_double(p.mean), format_double(p.lower95),
                         format_double(p.upper95)});
  }
}

void write_baseline_csv(std::ostream& out, const BaselineTable& table) {
  std::vector<std::string> header = {"group", "biomarker", "rule", "univariable_or",
                                     "univariable_lower95", "univariable_upper95"};
  for (const auto& w : table.windows) {
    const auto tag = "lr_" + std::to_string(w.lo) + "_" +
                     (w.open_ended() ? std::string("inf") : std::to_string(w.hi));
    for (const char* suffix : {"_or", "_lower95", "_upper95", "_n"}) header.push_back(tag + suffix);
  }
  csv::write_row(out, header);
  for (const auto& r : table.rows) {
    std::vector<std::string> row = {r.group, r.biomarker, r.rule};
    append_cell(row, r.univariable);
    for (std::size_t w = 0; w < table.windows.size(); ++w) {
      append_cell(row, r.windows[w]);
      row.push_back(std::to_string(table.window_rows[w]));
    }
    csv::write_row(out, row);
  }
}

nlohmann::json baseline_json(const BaselineTable& table) {
  nlohmann::json windows = nlohmann::json::array();
  for (std::size_t w = 0; w < table.windows.size(); ++w) {
    const auto& win = table.windows[w];
    nlohmann::json item = {{"lo", win.lo},
                           {"label", win.label()},
                           {"rows", table.window_rows[w]},
                           {"status", table.window_status[w]}};
    item["hi"] = win.open_ended() ? nlohmann::json(nullptr) : nlohmann::json(win.hi);
    windows.push_back(std::move(item));
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : r.windows) cells.push_back(cell_json(c));
    rows.push_back({{"group", r.group},
                    {"biomarker", r.biomarker},
                    {"rule", r.rule},
                    {"univariable", cell_json(r.univariable)},
                    {"windows", std::move(cells)}});
  }
  return {{"ridge", table.ridge}, {"windows", std::move(windows)}, {"rows", std::move(rows)}};
}

nlohmann::json roc_json(const RocResult& r) {
  return {{"auc", r.auc},       {"se", r.se},
          {"n_pos", r.n_pos},   {"n_neg", r.n_neg},
          {"method", to_string(r.method)},
          {"splits_used", r.split_aucs.size()},
          {"splits_skipped", r.skipped},
          {"split_aucs", r.split_aucs}};
}

void write_roc_curve_csv(std::ostream& out, std::span<const RocPoint> points) {
  csv::write_row(out, {"threshold", "fpr", "tpr"});
  for (const auto& p : points) {
    csv::write_row(out, {std::isinf(p.threshold) ? "inf" : format_double(p.threshold),
                         format_double(p.fpr), format_double(p.tpr)});
  }
}

void write_predictions_csv(std::ostream& out, const CohortTable& table,
                           std::span<const double> logits) {
  csv::write_row(out, {"patient_id", "admission_day", "outcome", "logit", "probability"});
  for (std::size_t r = 0; r < table.rows(); ++r) {
    csv::write_row(out, {table.patient_id(r), std::to_string(table.admission_day(r)),
                         std::to_string(table.outcome(r)), format_double(logits[r]),
                         format_double(sigmoid(logits[r]))});
  }
}

}  // namespace tvgam
