// Copyright 2026 The Orchard Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "orchard/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace orchard {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string svg_line_chart(const BinCurve& curve, const std::string& title) {
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  double x_lo = 0.0;
  double x_hi = 1.0;
  if (!curve.bins.empty()) {
    x_lo = curve.bins.front().lo;
    x_hi = curve.bins.back().hi;
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  }
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kTop + (1.0 - y) * plot_h; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::string heading = title.empty() ? "AR by " + curve.property : title;
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\">"
     << escape(heading) << "</text>\n";

  // Axes with five ticks each.
  os << "<g stroke=\"black\" fill=\"none\">\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kLeft + plot_w
     << "\" y2=\"" << py(0) << "\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kLeft
     << "\" y2=\"" << py(1) << "\"/>\n";
  os << "</g>\n";
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double xv = x_lo + f * (x_hi - x_lo);
    os << "<text x=\"" << px(xv) << "\" y=\"" << py(0) + 18
       << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(f) + 4
       << "\" text-anchor=\"end\">" << fmt(f) << "</text>\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << py(f) << "\" x2=\"" << kLeft + plot_w
       << "\" y2=\"" << py(f) << "\" stroke=\"#ddd\"/>\n";
  }
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
     << "\" text-anchor=\"middle\">" << escape(curve.property) << "</text>\n";

  if (!curve.bins.empty()) {
    os << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < curve.bins.size(); ++i) {
      const Bin& b = curve.bins[i];
      if (i) os << ' ';
      os << px(0.5 * (b.lo + b.hi)) << ',' << py(std::clamp(b.ar, 0.0, 1.0));
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace orchard
