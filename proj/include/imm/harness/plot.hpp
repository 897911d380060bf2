#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "imm/error.hpp"
#include "imm/harness/experiment.hpp"

namespace imm::harness {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::vector<std::string> expected_columns() { return split_csv_line(kCsvHeader); }

// Reads a trial CSV. A zero-byte file is an empty table; otherwise the header
// must match the trial schema exactly.
inline CsvTable read_trial_csv(std::istream& in, const std::string& name) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split_csv_line(line);
  const auto want = expected_columns();
  if (t.header != want) {
    std::string diff;
    for (const auto& c : want) {
      if (std::find(t.header.begin(), t.header.end(), c) == t.header.end()) diff += " -" + c;
    }
    for (const auto& c : t.header) {
      if (std::find(want.begin(), want.end(), c) == want.end()) diff += " +" + c;
    }
    if (diff.empty()) diff = " (column order differs)";
    throw ConfigError(name + ": CSV schema mismatch:" + diff);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto row = split_csv_line(line);
    if (row.size() != want.size()) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": expected " + std::to_string(want.size()) +
                        " fields, got " + std::to_string(row.size()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // sorted by x
};

// Mean of `column` per (variant, k), one series per variant in name order.
inline std::vector<Series> series_by_variant(const std::vector<CsvTable>& tables, const std::string& column) {
  const auto cols = expected_columns();
  const auto col = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), column) - cols.begin());
  std::map<std::string, std::map<double, std::pair<double, std::size_t>>> acc;
  for (const auto& t : tables) {
    for (const auto& row : t.rows) {
      auto& cell = acc[row[0]][std::stod(row[1])];
      cell.first += std::stod(row[col]);
      ++cell.second;
    }
  }
  std::vector<Series> out;
  for (const auto& [variant, by_k] : acc) {
    Series s{variant, {}};
    for (const auto& [k, sum] : by_k) s.points.emplace_back(k, sum.first / static_cast<double>(sum.second));
    out.push_back(std::move(s));
  }
  return out;
}

// Self-contained SVG line chart. Output depends only on the input values.
inline std::string render_line_chart(const std::vector<Series>& series, const std::string& title,
                                     const std::string& x_label, const std::string& y_label) {
  constexpr double W = 640, H = 420, L = 70, R = 130, T = 40, B = 55;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool any = false;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!any) {
        x0 = x1 = x;
        y0 = y1 = y;
        any = true;
      }
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (any) y0 = std::min(0.0, y0);
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << std::fixed << std::setprecision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
    << title << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << std::setprecision(1) << xv
      << std::setprecision(2) << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << std::setprecision(1) << yv
      << std::setprecision(2) << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label << "</text>\n";
  o << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"13\" transform=\"rotate(-90 16 " << (T + H - B) / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = palette[i % std::size(palette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t j = 0; j < s.points.size(); ++j) {
      o << (j ? " " : "") << px(s.points[j].first) << ',' << py(s.points[j].second);
    }
    o << "\"/>\n";
    for (const auto& [x, y] : s.points) {
      o << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = T + 10 + 20.0 * static_cast<double>(i);
    o << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 36 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - R + 42 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << s.label << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

struct Figures {
  std::string spread_svg;
  std::string time_svg;
};

inline Figures render_figures(const std::vector<CsvTable>& tables) {
  return {render_line_chart(series_by_variant(tables, "spread_mean"), "Influence spread", "k", "spread"),
          render_line_chart(series_by_variant(tables, "time_total_ms"), "Running time", "k", "time (ms)")};
}

}  // namespace imm::harness
