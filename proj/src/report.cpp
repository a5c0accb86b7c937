// Copyright 2026 The gramlimit Authors.
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

#include "gramlimit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>

namespace gramlimit {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const {
    return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin);
  }
  double py(double y) const {
    return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin);
  }
};

std::string open_svg(const Frame& fr, std::string_view title, std::string_view xl,
                     std::string_view yl) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
                  "\" height=\"" + num(kHeight) + "\" font-family=\"sans-serif\" "
                  "font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" "
       "font-size=\"13\">" + escape(title) + "</text>\n";
  s += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kHeight - kMargin) + "\" x2=\"" +
       num(kWidth - kMargin) + "\" y2=\"" + num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kMargin) + "\" x2=\"" + num(kMargin) +
       "\" y2=\"" + num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double x = fr.x0 + (fr.x1 - fr.x0) * t / 4.0;
    const double y = fr.y0 + (fr.y1 - fr.y0) * t / 4.0;
    s += "<text x=\"" + num(fr.px(x)) + "\" y=\"" + num(kHeight - kMargin + 15) +
         "\" text-anchor=\"middle\">" + label(x) + "</text>\n";
    s += "<text x=\"" + num(kMargin - 5) + "\" y=\"" + num(fr.py(y) + 4) +
         "\" text-anchor=\"end\">" + label(y) + "</text>\n";
  }
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 10) +
       "\" text-anchor=\"middle\">" + escape(xl) + "</text>\n";
  s += "<text x=\"12\" y=\"" + num(kHeight / 2) + "\" transform=\"rotate(-90 12 " +
       num(kHeight / 2) + ")\" text-anchor=\"middle\">" + escape(yl) + "</text>\n";
  return s;
}

std::string polyline(const Frame& fr, std::span<const double> x, std::span<const double> y,
                     const char* colour) {
  std::string s = "<polyline fill=\"none\" stroke=\"" + std::string(colour) +
                  "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < fr.x0 || x[i] > fr.x1) continue;
    s += num(fr.px(x[i])) + "," + num(fr.py(std::clamp(y[i], fr.y0, fr.y1))) + " ";
  }
  s += "\"/>\n";
  return s;
}

}  // namespace

std::string overlay_svg(const LimitDistribution& limit,
                        std::span<const double> eigenvalues, std::string_view title,
                        int bins) {
  std::vector<double> eig(eigenvalues.begin(), eigenvalues.end());
  std::sort(eig.begin(), eig.end());
  // Skip the atom at zero: it has no density to draw.
  const double floor = limit.atom0 > 0.0 ? 1e-8 * std::max(1.0, eig.empty() ? 1.0 : eig.back())
                                         : -std::numeric_limits<double>::infinity();
  std::vector<double> bulk;
  for (double v : eig) {
    if (v > floor) bulk.push_back(v);
  }
  double hi = bulk.empty() ? 1.0 : bulk[static_cast<std::size_t>(0.995 * (bulk.size() - 1))];
  hi = std::max(hi * 1.1, 1e-12);
  std::vector<double> counts(static_cast<std::size_t>(std::max(bins, 1)), 0.0);
  const double width = hi / static_cast<double>(counts.size());
  for (double v : bulk) {
    const auto b = static_cast<std::size_t>(std::clamp(v / width, 0.0,
                                                       static_cast<double>(counts.size() - 1)));
    if (v <= hi) counts[b] += 1.0;
  }
  const double total = eig.empty() ? 1.0 : static_cast<double>(eig.size());
  double ymax = 0.0;
  for (double& c : counts) {
    c /= total * width;
    ymax = std::max(ymax, c);
  }
  for (std::size_t i = 0; i < limit.x.size(); ++i) {
    if (limit.x[i] <= hi) ymax = std::max(ymax, limit.density[i]);
  }
  ymax = std::min(ymax, 4.0 * (counts.empty() ? 1.0 : *std::max_element(counts.begin(), counts.end())) + 1e-12);
  const Frame fr{0.0, hi, 0.0, ymax * 1.05 + 1e-12};
  std::string s = open_svg(fr, title, "x", "density");
  for (std::size_t b = 0; b < counts.size(); ++b) {
    const double x0 = fr.px(b * width);
    const double x1 = fr.px((b + 1) * width);
    const double y = fr.py(std::min(counts[b], fr.y1));
    s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y) + "\" width=\"" + num(x1 - x0) +
         "\" height=\"" + num(kHeight - kMargin - y) +
         "\" fill=\"#c6dbef\" stroke=\"#6baed6\" stroke-width=\"0.5\"/>\n";
  }
  s += polyline(fr, limit.x, limit.density, kPalette[1]);
  s += "</svg>\n";
  return s;
}

std::string line_chart_svg(std::span<const Series> series, std::string_view title,
                           std::string_view x_label, std::string_view y_label) {
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const Series& sr : series) {
    for (std::size_t i = 0; i < sr.x.size(); ++i) {
      x0 = std::min(x0, sr.x[i]);
      x1 = std::max(x1, sr.x[i]);
      y0 = std::min(y0, sr.y[i]);
      y1 = std::max(y1, sr.y[i]);
    }
  }
  if (!(x1 > x0)) {
    x0 = 0.0;
    x1 = 1.0;
  }
  if (!(y1 > y0)) {
    y0 = std::isfinite(y0) ? y0 - 1.0 : 0.0;
    y1 = y0 + 2.0;
  }
  const Frame fr{x0, x1, y0, y1};
  std::string s = open_svg(fr, title, x_label, y_label);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* colour = kPalette[k % std::size(kPalette)];
    s += polyline(fr, series[k].x, series[k].y, colour);
    s += "<text x=\"" + num(kWidth - kMargin - 5) + "\" y=\"" + num(kMargin + 14.0 * k) +
         "\" text-anchor=\"end\" fill=\"" + colour + "\">" + escape(series[k].label) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string text_table(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) width[j] = header[j].size();
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size() && j < width.size(); ++j) {
      width[j] = std::max(width[j], row[j].size());
    }
  }
  const auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t j = 0; j < width.size(); ++j) {
      const std::string cell = j < cells.size() ? cells[j] : "";
      s += (j ? "  " : "") + std::string(width[j] - cell.size(), ' ') + cell;
    }
    return s + "\n";
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (std::size_t w : width) total += w + 2;
  out += std::string(total > 2 ? total - 2 : 0, '-') + "\n";
  for (const auto& row : rows) out += line(row);
  return out;
}

}  // namespace gramlimit
