// Copyright 2026 The ProBA Authors.
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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "proba/error.h"
#include "proba/io.h"

namespace proba {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 160.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

CsvTable ParseCsv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != table.header.size()) {
        throw Error(ErrorCode::kInvalidInput,
                    "csv row " + std::to_string(table.rows.size() + 1) +
                        " has " + std::to_string(cells.size()) + " cells");
      }
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) throw Error(ErrorCode::kInvalidInput, "empty csv");
  return table;
}

std::string TraceToSvg(const CsvTable& table,
                       const std::vector<std::string>& columns,
                       const std::string& title) {
  std::vector<int> idx;
  for (const std::string& c : columns) {
    auto it = std::find(table.header.begin(), table.header.end(), c);
    if (it == table.header.end()) {
      throw Error(ErrorCode::kInvalidInput, "unknown column '" + c + "'");
    }
    idx.push_back(static_cast<int>(it - table.header.begin()));
  }
  // Series of (x, y) with empty cells skipped.
  std::vector<std::vector<std::pair<double, double>>> series(idx.size());
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& row : table.rows) {
    if (row[0].empty()) continue;
    const double x = std::stod(row[0]);
    for (std::size_t s = 0; s < idx.size(); ++s) {
      const std::string& cell = row[idx[s]];
      if (cell.empty()) continue;
      const double y = std::stod(cell);
      if (!std::isfinite(y)) continue;
      series[s].emplace_back(x, y);
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" "
      << "font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"14\">"
        << Escape(title) << "</text>\n";
  }
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = xmin + (xmax - xmin) * t / 4.0;
    const double fy = ymin + (ymax - ymin) * t / 4.0;
    svg << "<text x=\"" << sx(fx) << "\" y=\"" << kTop + ph + 18
        << "\" text-anchor=\"middle\">" << Num(fx) << "</text>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(fy) + 4
        << "\" text-anchor=\"end\">" << Num(fy) << "</text>\n";
    svg << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\""
        << sy(fy) << "\" y2=\"" << sy(fy) << "\" stroke=\"#ddd\"/>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">" << Escape(table.header[0]) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[s]) svg << sx(x) << ',' << sy(y) << ' ';
    svg << "\"/>\n";
    const double ly = kTop + 16.0 * (s + 1);
    svg << "<line x1=\"" << kLeft + pw + 12 << "\" x2=\"" << kLeft + pw + 32
        << "\" y1=\"" << ly - 4 << "\" y2=\"" << ly - 4 << "\" stroke=\""
        << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + pw + 38 << "\" y=\"" << ly << "\">"
        << Escape(columns[s]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace proba
