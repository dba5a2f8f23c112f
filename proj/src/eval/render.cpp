// Copyright 2026 The semupdate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "eval/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace semupdate {
namespace {

constexpr const char *kPartitionRowNames[3] = {"Change", "Unchange", "Triv-unch"};

std::string Pad(const std::string &s, size_t width, bool right = true) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return right ? fill + s : s + fill;
}

std::string Fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

// Four decimals, used for machine-readable output.
double Round4(double v) { return std::round(v * 1e4) / 1e4; }

void TableRows(std::ostringstream &out, const std::string &update,
               const std::vector<StrategySummary> &rows, size_t width) {
  for (int p = 0; p < 3; ++p) {
    out << Pad(p == 0 ? update : "", 8, false) << Pad(kPartitionRowNames[p], 10, false);
    for (const StrategySummary &row : rows) out << Pad(FormatPercent(row.mean[p]), width);
    out << '\n';
  }
}

const char *kSvgHeader =
    "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
    "font-family=\"sans-serif\" font-size=\"11\">\n";

}  // namespace

std::string FormatPercent(double fraction) { return Fixed(100.0 * fraction, 1); }

std::string RenderSummaryTable(const Summary &summary) {
  size_t width = 8;
  for (const StrategySummary &row : summary.rows) {
    width = std::max(width, row.strategy.size() + 2);
  }
  std::ostringstream out;
  out << Pad("Update", 8, false) << Pad("Partition", 10, false);
  for (const StrategySummary &row : summary.rows) out << Pad(row.strategy, width);
  out << '\n';
  for (const auto &[update, rows] : summary.per_update) {
    TableRows(out, update, rows, width);
  }
  TableRows(out, "Avg", summary.rows, width);
  out << Pad("", 8) << Pad("Macro", 10, false);
  for (const StrategySummary &row : summary.rows) out << Pad(FormatPercent(row.macro), width);
  out << '\n';
  out << "updates: " << summary.updates.size() << ", seeds: " << summary.seeds.size()
      << '\n';
  if (summary.best_baseline) {
    const StrategySummary *best = summary.Find(*summary.best_baseline);
    const StrategySummary *oracle = summary.Find("oracle");
    out << "best baseline: " << best->strategy << " (macro "
        << FormatPercent(best->macro) << "), oracle macro "
        << FormatPercent(oracle->macro) << '\n';
    for (const auto &[strategy, pct] : summary.gap_closure) {
      out << "gap closure " << strategy << ": " << Fixed(pct, 1) << "%\n";
    }
  } else {
    out << "gap closure: n/a (needs a baseline and an oracle above it)\n";
  }
  return out.str();
}

nlohmann::json SummaryToJson(const Summary &summary) {
  auto row_json = [](const StrategySummary &row) {
    return nlohmann::json{{"strategy", row.strategy},
                          {"changed", Round4(row.mean[0])},
                          {"unchanged", Round4(row.mean[1])},
                          {"trivially_unchanged", Round4(row.mean[2])},
                          {"macro", Round4(row.macro)},
                          {"cells", row.cells}};
  };
  nlohmann::json j;
  j["updates"] = summary.updates;
  j["seeds"] = summary.seeds;
  j["strategies"] = nlohmann::json::array();
  for (const StrategySummary &row : summary.rows) j["strategies"].push_back(row_json(row));
  j["per_update"] = nlohmann::json::object();
  for (const auto &[update, rows] : summary.per_update) {
    for (const StrategySummary &row : rows) j["per_update"][update].push_back(row_json(row));
  }
  if (summary.best_baseline) j["best_baseline"] = *summary.best_baseline;
  j["gap_closure"] = nlohmann::json::object();
  for (const auto &[strategy, pct] : summary.gap_closure) {
    j["gap_closure"][strategy] = Round4(pct);
  }
  return j;
}

std::string RenderSummarySvg(const Summary &summary) {
  const int group = 70, bar = 18, left = 50, top = 20, plot_h = 200;
  const int width = left + group * static_cast<int>(summary.rows.size()) + 20;
  const int height = top + plot_h + 90;
  const char *colors[3] = {"#4878a8", "#e0904a", "#6aa56a"};
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), kSvgHeader, width, height);
  out << buf;
  for (int tick = 0; tick <= 100; tick += 25) {
    const int y = top + plot_h - plot_h * tick / 100;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#ddd\"/>"
                  "<text x=\"%d\" y=\"%d\" text-anchor=\"end\">%d</text>\n",
                  left, y, width - 10, y, left - 5, y + 4, tick);
    out << buf;
  }
  for (size_t i = 0; i < summary.rows.size(); ++i) {
    const StrategySummary &row = summary.rows[i];
    const int x0 = left + group * static_cast<int>(i) + 8;
    for (int p = 0; p < 3; ++p) {
      const int h = static_cast<int>(std::lround(plot_h * row.mean[p]));
      std::snprintf(buf, sizeof(buf),
                    "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"%s\"/>\n",
                    x0 + p * bar, top + plot_h - h, bar - 2, h, colors[p]);
      out << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text transform=\"translate(%d,%d) rotate(40)\">%s</text>\n",
                  x0 + 10, top + plot_h + 14, row.strategy.c_str());
    out << buf;
  }
  for (int p = 0; p < 3; ++p) {
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%d\" y=\"%d\" width=\"10\" height=\"10\" fill=\"%s\"/>"
                  "<text x=\"%d\" y=\"%d\">%s</text>\n",
                  left + 110 * p, height - 14, colors[p], left + 110 * p + 14,
                  height - 5, kPartitionRowNames[p]);
    out << buf;
  }
  out << "</svg>\n";
  return out.str();
}

std::string RenderCurveTable(const std::vector<CurveRow> &rows) {
  std::ostringstream out;
  out << Pad("Update", 10, false) << Pad("V2 size", 8) << Pad("Conflicting", 13)
      << Pad("No conflict", 13) << Pad("Gap", 8) << '\n';
  for (const CurveRow &row : rows) {
    out << Pad(row.update, 10, false) << Pad(std::to_string(row.v2_size), 8)
        << Pad(FormatPercent(row.conflicting), 13)
        << Pad(FormatPercent(row.oracle_removed), 13)
        << Pad(FormatPercent(row.oracle_removed - row.conflicting), 8) << '\n';
  }
  return out.str();
}

nlohmann::json CurveToJson(const std::vector<CurveRow> &rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const CurveRow &row : rows) {
    j.push_back({{"update", row.update},
                 {"v2_size", row.v2_size},
                 {"conflicting", Round4(row.conflicting)},
                 {"oracle_removed", Round4(row.oracle_removed)}});
  }
  return j;
}

std::string RenderCurveSvg(const std::vector<CurveRow> &rows) {
  std::vector<const CurveRow *> avg;
  for (const CurveRow &row : rows) {
    if (row.update == "Average") avg.push_back(&row);
  }
  const int left = 50, top = 20, plot_w = 360, plot_h = 220;
  const int width = left + plot_w + 30, height = top + plot_h + 60;
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), kSvgHeader, width, height);
  out << buf;
  for (int tick = 0; tick <= 100; tick += 20) {
    const int y = top + plot_h - plot_h * tick / 100;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#ddd\"/>"
                  "<text x=\"%d\" y=\"%d\" text-anchor=\"end\">%d</text>\n",
                  left, y, left + plot_w, y, left - 5, y + 4, tick);
    out << buf;
  }
  // Sizes are spaced evenly, matching the doubling sweep.
  auto x_of = [&](size_t i) {
    return avg.size() <= 1 ? left + plot_w / 2
                           : left + static_cast<int>(i) * plot_w /
                                        static_cast<int>(avg.size() - 1);
  };
  auto y_of = [&](double frac) {
    return top + plot_h - static_cast<int>(std::lround(plot_h * frac));
  };
  const char *colors[2] = {"#c0504d", "#4f81bd"};
  const char *labels[2] = {"conflicting", "no conflict (oracle removed)"};
  for (int series = 0; series < 2; ++series) {
    std::string points;
    for (size_t i = 0; i < avg.size(); ++i) {
      const double v = series == 0 ? avg[i]->conflicting : avg[i]->oracle_removed;
      points += std::to_string(x_of(i)) + "," + std::to_string(y_of(v)) + " ";
      std::snprintf(buf, sizeof(buf),
                    "<circle cx=\"%d\" cy=\"%d\" r=\"3\" fill=\"%s\"/>\n", x_of(i),
                    y_of(v), colors[series]);
      out << buf;
    }
    out << "<polyline fill=\"none\" stroke=\"" << colors[series]
        << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%d\" y=\"%d\" width=\"10\" height=\"10\" fill=\"%s\"/>"
                  "<text x=\"%d\" y=\"%d\">%s</text>\n",
                  left + 180 * series, height - 14, colors[series],
                  left + 180 * series + 14, height - 5, labels[series]);
    out << buf;
  }
  for (size_t i = 0; i < avg.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "<text x=\"%d\" y=\"%d\" text-anchor=\"middle\">%d</text>\n",
                  x_of(i), top + plot_h + 16, avg[i]->v2_size);
    out << buf;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace semupdate
