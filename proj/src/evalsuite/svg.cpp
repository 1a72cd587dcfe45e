// Copyright 2026 The hapticbench Authors
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

#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hact::eval::svg {

namespace {

constexpr double kLeft = 56, kRight = 16, kTop = 28, kBottom = 40;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axes {
  Frame f;
  double x0, x1, y0, y1;
  double px(double x) const { return f.x + kLeft + (x - x0) / (x1 - x0) * (f.width - kLeft - kRight); }
  double py(double y) const { return f.y + f.height - kBottom - (y - y0) / (y1 - y0) * (f.height - kTop - kBottom); }
};

void widen(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
}

std::string frame_and_ticks(const Axes& a, const std::string& title, const std::string& x_label,
                            const std::string& y_label, bool x_ticks) {
  std::string s;
  const double l = a.f.x + kLeft, r = a.f.x + a.f.width - kRight;
  const double t = a.f.y + kTop, b = a.f.y + a.f.height - kBottom;
  s += "<rect x=\"" + num(l) + "\" y=\"" + num(t) + "\" width=\"" + num(r - l) + "\" height=\"" +
       num(b - t) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  s += "<text x=\"" + num((l + r) / 2) + "\" y=\"" + num(a.f.y + 18) +
       "\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
  s += "<text x=\"" + num((l + r) / 2) + "\" y=\"" + num(a.f.y + a.f.height - 6) +
       "\" text-anchor=\"middle\" font-size=\"11\">" + escape(x_label) + "</text>\n";
  s += "<text transform=\"translate(" + num(a.f.x + 12) + "," + num((t + b) / 2) +
       ") rotate(-90)\" text-anchor=\"middle\" font-size=\"11\">" + escape(y_label) + "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = a.y0 + (a.y1 - a.y0) * i / 4.0;
    s += "<line x1=\"" + num(l - 4) + "\" y1=\"" + num(a.py(yv)) + "\" x2=\"" + num(l) + "\" y2=\"" +
         num(a.py(yv)) + "\" stroke=\"#444\"/>";
    s += "<text x=\"" + num(l - 6) + "\" y=\"" + num(a.py(yv) + 4) +
         "\" text-anchor=\"end\" font-size=\"10\">" + tick_label(yv) + "</text>\n";
    if (!x_ticks) continue;
    const double xv = a.x0 + (a.x1 - a.x0) * i / 4.0;
    s += "<text x=\"" + num(a.px(xv)) + "\" y=\"" + num(b + 14) +
         "\" text-anchor=\"middle\" font-size=\"10\">" + tick_label(xv) + "</text>\n";
  }
  return s;
}

std::string legend(const Frame& f, const std::vector<std::string>& names,
                   const std::vector<std::string>& colors) {
  std::string s;
  double x = f.x + kLeft + 8;
  for (std::size_t i = 0; i < names.size(); ++i) {
    s += "<rect x=\"" + num(x) + "\" y=\"" + num(f.y + kTop + 6) +
         "\" width=\"10\" height=\"10\" fill=\"" + colors[i] + "\"/>";
    s += "<text x=\"" + num(x + 14) + "\" y=\"" + num(f.y + kTop + 15) + "\" font-size=\"11\">" +
         escape(names[i]) + "</text>\n";
    x += 24 + 7.0 * static_cast<double>(names[i].size());
  }
  return s;
}

}  // namespace

std::string line_panel(const Frame& frame, const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t n = 1;
  for (const auto& s : series) {
    n = std::max(n, s.y.size());
    for (double v : s.y) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  widen(lo, hi);
  const Axes a{frame, 0.0, static_cast<double>(std::max<std::size_t>(n - 1, 1)), lo, hi};
  std::string s = "<g>\n" + frame_and_ticks(a, title, x_label, y_label, true);
  std::vector<std::string> names, colors;
  for (const auto& ser : series) {
    names.push_back(ser.name);
    colors.push_back(ser.color);
    if (ser.y.empty()) continue;
    s += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" + ser.color + "\" points=\"";
    for (std::size_t i = 0; i < ser.y.size(); ++i) {
      s += num(a.px(static_cast<double>(i))) + "," + num(a.py(ser.y[i])) + " ";
    }
    s += "\"/>\n";
  }
  s += legend(frame, names, colors) + "</g>\n";
  return s;
}

std::string box_panel(const Frame& frame, const std::string& title, const std::string& y_label,
                      const std::vector<std::string>& names, const std::vector<std::string>& colors,
                      const std::vector<BoxGroup>& groups) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& g : groups) {
    for (const auto& b : g.boxes) {
      lo = std::min(lo, b.whisker_low);
      hi = std::max(hi, b.whisker_high);
    }
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  widen(lo, hi);
  const Axes a{frame, 0.0, static_cast<double>(groups.size()), lo, hi};
  std::string s = "<g>\n" + frame_and_ticks(a, title, "", y_label, false);
  const double slot = (a.px(1.0) - a.px(0.0));
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    const double left = a.px(static_cast<double>(gi)) + 0.1 * slot;
    const double bw = 0.8 * slot / static_cast<double>(std::max<std::size_t>(g.boxes.size(), 1));
    for (std::size_t bi = 0; bi < g.boxes.size(); ++bi) {
      const auto& b = g.boxes[bi];
      const double x = left + bw * static_cast<double>(bi);
      const double cx = x + bw / 2;
      const std::string& c = colors[bi % colors.size()];
      s += "<line x1=\"" + num(cx) + "\" y1=\"" + num(a.py(b.whisker_low)) + "\" x2=\"" + num(cx) +
           "\" y2=\"" + num(a.py(b.whisker_high)) + "\" stroke=\"" + c + "\"/>";
      s += "<rect x=\"" + num(x + 2) + "\" y=\"" + num(a.py(b.q3)) + "\" width=\"" + num(bw - 4) +
           "\" height=\"" + num(std::max(a.py(b.q1) - a.py(b.q3), 0.5)) + "\" fill=\"" + c +
           "\" fill-opacity=\"0.35\" stroke=\"" + c + "\"/>";
      s += "<line x1=\"" + num(x + 2) + "\" y1=\"" + num(a.py(b.median)) + "\" x2=\"" +
           num(x + bw - 2) + "\" y2=\"" + num(a.py(b.median)) + "\" stroke=\"#000\"/>\n";
    }
    s += "<text x=\"" + num(a.px(gi + 0.5)) + "\" y=\"" + num(frame.y + frame.height - kBottom + 14) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + escape(g.label) + "</text>\n";
  }
  s += legend(frame, names, colors) + "</g>\n";
  return s;
}

std::string document(double width, double height, const std::string& body) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
         "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n" +
         body + "</svg>\n";
}

}  // namespace hact::eval::svg
