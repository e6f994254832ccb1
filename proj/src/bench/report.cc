// Copyright 2026 The robustqn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "robustqn/bench/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace robustqn::bench {
namespace {

constexpr const char* kCsvHeader = "estimator,epsilon,m,n,p,alpha,mrse,stderr";

std::string Num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T ParseField(const std::string& field, int line_no) {
  T out{};
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("MRSE CSV line " + std::to_string(line_no) +
                                ": bad field '" + field + "'");
  }
  return out;
}

struct DashStyle {
  const char* name;
  const char* color;
  const char* dash;  // empty for solid
};

constexpr DashStyle kStyles[] = {
    {"cq", "#1f77b4", "8,4"},
    {"os", "#ff7f0e", "2,3"},
    {"qn", "#2ca02c", "8,3,2,3"},
    {"qn_nodp", "#000000", ""},
};

void OpenOrThrow(std::ofstream& out, const std::string& path) {
  out.open(path);
  if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace

void WriteMrseCsv(const MrseReport& report, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const MrseRow& r : report.rows) {
    out << r.estimator << ',' << Num(r.epsilon) << ',' << r.m << ',' << r.n
        << ',' << r.p << ',' << Num(r.alpha) << ',' << Num(r.mrse) << ','
        << Num(r.stderr_) << '\n';
  }
}

void WriteMrseCsvFile(const MrseReport& report, const std::string& path) {
  std::ofstream out;
  OpenOrThrow(out, path);
  WriteMrseCsv(report, out);
  if (!out) throw std::runtime_error("write failed for " + path);
}

MrseReport ParseMrseCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::invalid_argument("MRSE CSV: unexpected header");
  }
  MrseReport report;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 8) {
      throw std::invalid_argument("MRSE CSV line " + std::to_string(line_no) +
                                  ": expected 8 fields");
    }
    MrseRow r;
    r.estimator = f[0];
    r.epsilon = ParseField<double>(f[1], line_no);
    r.m = ParseField<int>(f[2], line_no);
    r.n = ParseField<int>(f[3], line_no);
    r.p = ParseField<int>(f[4], line_no);
    r.alpha = ParseField<double>(f[5], line_no);
    r.mrse = ParseField<double>(f[6], line_no);
    r.stderr_ = ParseField<double>(f[7], line_no);
    report.rows.push_back(r);
  }
  return report;
}

void EmitSvg(const MrseReport& report, GridKind kind, std::ostream& out) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 70, kRight = 150, kTop = 30, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double x_min = INFINITY, x_max = -INFINITY, y_max = 0.0;
  for (const MrseRow& r : report.rows) {
    if (!std::isfinite(r.mrse)) continue;
    const double x = kind == GridKind::kEpsilon ? r.epsilon : r.m;
    series[r.estimator].emplace_back(x, r.mrse);
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    y_max = std::max(y_max, r.mrse);
  }
  if (!(x_max > x_min)) {
    x_min = std::isfinite(x_min) ? x_min - 1 : 0;
    x_max = x_min + 2;
  }
  if (!(y_max > 0.0)) y_max = 1.0;
  y_max *= 1.1;
  auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return kTop + plot_h - y / y_max * plot_h; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" "
      << "font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x_min + (x_max - x_min) * t / 4.0;
    const double yv = y_max * t / 4.0;
    out << "<text x=\"" << sx(xv) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << Num(std::round(xv * 100) / 100)
        << "</text>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(yv) + 4
        << "\" text-anchor=\"end\">" << Num(std::round(yv * 1000) / 1000)
        << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 8
      << "\" text-anchor=\"middle\">"
      << (kind == GridKind::kEpsilon ? "epsilon" : "m") << "</text>\n";
  out << "<text x=\"16\" y=\"" << kTop + plot_h / 2
      << "\" transform=\"rotate(-90 16 " << kTop + plot_h / 2
      << ")\" text-anchor=\"middle\">MRSE</text>\n";

  int legend_row = 0;
  for (const DashStyle& style : kStyles) {
    auto it = series.find(style.name);
    if (it == series.end()) continue;
    auto pts = it->second;
    std::sort(pts.begin(), pts.end());
    out << "<polyline fill=\"none\" stroke=\"" << style.color
        << "\" stroke-width=\"2\"";
    if (*style.dash) out << " stroke-dasharray=\"" << style.dash << "\"";
    out << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      out << (i ? " " : "") << sx(pts[i].first) << ',' << sy(pts[i].second);
    }
    out << "\"/>\n";
    const double ly = kTop + 10 + 20 * legend_row++;
    const double lx = kLeft + plot_w + 15;
    out << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 30
        << "\" y2=\"" << ly << "\" stroke=\"" << style.color
        << "\" stroke-width=\"2\"";
    if (*style.dash) out << " stroke-dasharray=\"" << style.dash << "\"";
    out << "/>\n<text x=\"" << lx + 36 << "\" y=\"" << ly + 4 << "\">"
        << style.name << "</text>\n";
  }
  out << "</svg>\n";
}

void EmitSvgFile(const MrseReport& report, GridKind kind,
                 const std::string& path) {
  std::ofstream out;
  OpenOrThrow(out, path);
  EmitSvg(report, kind, out);
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace robustqn::bench
