// Copyright 2026 The seqplan Authors
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

// Standalone SVG plots: path projections, sweep curves, point scatters.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "seqplan/core.hpp"
#include "seqplan/experiments.hpp"
#include "seqplan/planner/free_space.hpp"
#include "seqplan/planner/psm.hpp"

namespace seqplan {

namespace svg {

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                           "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

inline const char* color(size_t i) { return kPalette[i % 8]; }

/// Maps a data rectangle onto a pixel panel (y up).
struct Panel {
  double x0, y0, w, h;           // pixels
  double lo_x, hi_x, lo_y, hi_y;  // data

  double px(double x) const { return x0 + (x - lo_x) / (hi_x - lo_x) * w; }
  double py(double y) const { return y0 + h - (y - lo_y) / (hi_y - lo_y) * h; }
};

inline std::pair<double, double> padded(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

inline std::string header(int width, int height) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      width, height);
}

inline std::string frame(const Panel& p, const std::string& x_label,
                         const std::string& y_label) {
  std::string s = fmt::format(
      "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
      "stroke=\"#444\"/>\n",
      p.x0, p.y0, p.w, p.h);
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                   p.x0 + p.w / 2, p.y0 + p.h + 32, x_label);
  s += fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 {:.1f} {:.1f})\">{}</text>\n",
      p.x0 - 40, p.y0 + p.h / 2, p.x0 - 40, p.y0 + p.h / 2, y_label);
  for (int t = 0; t <= 4; ++t) {
    const double fx = p.lo_x + (p.hi_x - p.lo_x) * t / 4.0;
    const double fy = p.lo_y + (p.hi_y - p.lo_y) * t / 4.0;
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" "
                     "font-size=\"10\">{:.3g}</text>\n",
                     p.px(fx), p.y0 + p.h + 14, fx);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\" "
                     "font-size=\"10\">{:.3g}</text>\n",
                     p.x0 - 4, p.py(fy) + 3, fy);
  }
  return s;
}

inline std::string polyline(const Panel& p, const std::vector<std::pair<double, double>>& pts,
                            const char* stroke, double width = 1.5) {
  std::string s = "<polyline fill=\"none\" stroke=\"";
  s += stroke;
  s += fmt::format("\" stroke-width=\"{}\" points=\"", width);
  for (const auto& [x, y] : pts) s += fmt::format("{:.2f},{:.2f} ", p.px(x), p.py(y));
  s += "\"/>\n";
  return s;
}

}  // namespace svg

/// Path waypoints projected onto coordinate pairs (0,1) and (0,2); one
/// colour per manifold segment, obstacles drawn as grey rectangles.
inline std::string svg_path_plot(const PathResult& result, const SequencedTask& task,
                                 const std::string& title = "path") {
  const int k = static_cast<int>(task.start.size());
  std::vector<std::pair<int, int>> views{{0, 1}};
  if (k >= 3) views.push_back({0, 2});
  const int width = 60 + 340 * static_cast<int>(views.size());
  const int height = 400;
  std::string s = svg::header(width, height);
  s += fmt::format("<text x=\"{}\" y=\"20\" font-size=\"14\">{}</text>\n", 20, title);
  const char* names = "xyzuvw";
  for (size_t v = 0; v < views.size(); ++v) {
    const auto [a, b] = views[v];
    const double lo_a = task.bounds.lo[a], hi_a = task.bounds.hi[a];
    const double lo_b = task.bounds.lo[b], hi_b = task.bounds.hi[b];
    svg::Panel p{60.0 + 340.0 * static_cast<double>(v), 40.0, 290.0, 300.0,
                 lo_a, hi_a, lo_b, hi_b};
    std::string xl = a < 6 ? std::string(1, names[a]) : "q" + std::to_string(a);
    std::string yl = b < 6 ? std::string(1, names[b]) : "q" + std::to_string(b);
    s += svg::frame(p, xl, yl);
    for (const Box& o : task.obstacles) {
      s += fmt::format(
          "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" "
          "fill=\"#bbb\" fill-opacity=\"0.5\"/>\n",
          p.px(o.lo[a]), p.py(o.hi[b]), p.px(o.hi[a]) - p.px(o.lo[a]),
          p.py(o.lo[b]) - p.py(o.hi[b]));
    }
    if (!result.success) continue;
    for (size_t seg = 0; seg + 1 < result.segment_starts.size(); ++seg) {
      std::vector<std::pair<double, double>> pts;
      for (int i = result.segment_starts[seg]; i <= result.segment_starts[seg + 1]; ++i) {
        const Config& q = result.waypoints[static_cast<size_t>(i)];
        pts.emplace_back(q[a], q[b]);
      }
      s += svg::polyline(p, pts, svg::color(seg), 2.0);
    }
    const Config& q0 = result.waypoints.front();
    s += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"4\" fill=\"black\"/>\n",
                     p.px(q0[a]), p.py(q0[b]));
  }
  if (!result.success) {
    s += fmt::format("<text x=\"20\" y=\"{}\" fill=\"#d62728\">no path (stage {})</text>\n",
                     height - 12, result.failure_stage);
  }
  return s + "</svg>\n";
}

/// Mean +- std of a sweep against the swept value (log x when requested).
inline std::string svg_sweep_plot(const std::vector<SweepPoint>& points,
                                  const std::string& x_label, const std::string& y_label,
                                  bool log_x = false) {
  const int width = 480;
  const int height = 380;
  std::string s = svg::header(width, height);
  auto xv = [log_x](double x) { return log_x ? std::log10(x) : x; };
  double lx = std::numeric_limits<double>::infinity(), hx = -lx, ly = lx, hy = -lx;
  for (const SweepPoint& p : points) {
    if (p.successes == 0) continue;
    lx = std::min(lx, xv(p.value));
    hx = std::max(hx, xv(p.value));
    ly = std::min(ly, p.metric.mean - p.metric.std);
    hy = std::max(hy, p.metric.mean + p.metric.std);
  }
  if (!std::isfinite(lx)) {
    lx = 0.0;
    hx = 1.0;
    ly = 0.0;
    hy = 1.0;
  }
  const auto [plx, phx] = svg::padded(lx, hx);
  const auto [ply, phy] = svg::padded(ly, hy);
  svg::Panel panel{70.0, 20.0, 380.0, 300.0, plx, phx, ply, phy};
  s += svg::frame(panel, log_x ? "log10(" + x_label + ")" : x_label, y_label);
  std::vector<std::pair<double, double>> line;
  for (const SweepPoint& p : points) {
    if (p.successes == 0) continue;
    const double x = xv(p.value);
    line.emplace_back(x, p.metric.mean);
    s += fmt::format(
        "<line x1=\"{0:.1f}\" x2=\"{0:.1f}\" y1=\"{1:.1f}\" y2=\"{2:.1f}\" stroke=\"#888\"/>\n",
        panel.px(x), panel.py(p.metric.mean - p.metric.std),
        panel.py(p.metric.mean + p.metric.std));
    s += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"{}\"/>\n",
                     panel.px(x), panel.py(p.metric.mean), svg::color(0));
  }
  s += svg::polyline(panel, line, svg::color(0));
  return s + "</svg>\n";
}

/// Scatter of labelled point groups projected onto coordinates (a, b).
struct ScatterGroup {
  std::string label;
  std::vector<Config> points;
};

inline std::string svg_scatter(const std::vector<ScatterGroup>& groups, int a = 0,
                               int b = 2) {
  const int width = 520;
  const int height = 440;
  std::string s = svg::header(width, height);
  double lx = std::numeric_limits<double>::infinity(), hx = -lx, ly = lx, hy = -lx;
  for (const ScatterGroup& g : groups) {
    for (const Config& q : g.points) {
      lx = std::min(lx, q[a]);
      hx = std::max(hx, q[a]);
      ly = std::min(ly, q[b]);
      hy = std::max(hy, q[b]);
    }
  }
  if (!std::isfinite(lx)) {
    lx = ly = 0.0;
    hx = hy = 1.0;
  }
  const auto [plx, phx] = svg::padded(lx, hx);
  const auto [ply, phy] = svg::padded(ly, hy);
  svg::Panel panel{70.0, 20.0, 360.0, 360.0, plx, phx, ply, phy};
  s += svg::frame(panel, "q" + std::to_string(a), "q" + std::to_string(b));
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    for (const Config& q : groups[gi].points) {
      s += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"1.5\" fill=\"{}\"/>\n",
                       panel.px(q[a]), panel.py(q[b]), svg::color(gi));
    }
    s += fmt::format("<text x=\"445\" y=\"{}\" fill=\"{}\">{}</text>\n", 40 + 16 * gi,
                     svg::color(gi), groups[gi].label);
  }
  return s + "</svg>\n";
}

}  // namespace seqplan
