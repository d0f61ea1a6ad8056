#pragma once

// Standalone SVG line plots of KDE curves.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "cfair/error.hpp"
#include "cfair/metrics.hpp"

namespace cfair {

struct LabeledCurve {
  KdeCurve curve;
  std::string label;
};

namespace svg_detail {

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace svg_detail

/// Renders the curves on shared axes with a legend and `title`.
inline std::string render_kde_svg(const std::vector<LabeledCurve>& curves, const std::string& title) {
  using svg_detail::num;
  if (curves.empty()) throw Error("render_kde_svg: no curves");
  for (const auto& c : curves)
    if (c.curve.grid.empty() || c.curve.grid.size() != c.curve.density.size())
      throw Error("render_kde_svg: malformed curve '" + c.label + "'");

  constexpr double width = 640, height = 400;
  constexpr double left = 60, right = 20, top = 40, bottom = 50;
  constexpr double plot_w = width - left - right, plot_h = height - top - bottom;
  static constexpr std::array<const char*, 6> colors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  double xmin = curves.front().curve.grid.front(), xmax = curves.front().curve.grid.back(), ymax = 0.0;
  for (const auto& c : curves) {
    xmin = std::min(xmin, c.curve.grid.front());
    xmax = std::max(xmax, c.curve.grid.back());
    for (double d : c.curve.density) ymax = std::max(ymax, d);
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= 0.0) ymax = 1.0;
  ymax *= 1.05;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return top + plot_h - y / ymax * plot_h; };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
       "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  s += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "  <text x=\"" + num(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
       svg_detail::escape(title) + "</text>\n";
  // axes
  s += "  <g stroke=\"black\" stroke-width=\"1\">\n";
  s += "    <line x1=\"" + num(left) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(left + plot_w) + "\" y2=\"" +
       num(top + plot_h) + "\"/>\n";
  s += "    <line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" + num(top + plot_h) +
       "\"/>\n";
  s += "  </g>\n";
  s += "  <g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4.0;
    const double yv = ymax * t / 4.0;
    s += "    <text x=\"" + num(px(xv)) + "\" y=\"" + num(top + plot_h + 16) + "\" text-anchor=\"middle\">" +
         svg_detail::tick(xv) + "</text>\n";
    s += "    <text x=\"" + num(left - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" +
         svg_detail::tick(yv) + "</text>\n";
  }
  s += "    <text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(height - 10) +
       "\" text-anchor=\"middle\">prediction</text>\n";
  s += "    <text x=\"14\" y=\"" + num(top + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
       num(top + plot_h / 2) + ")\">density</text>\n";
  s += "  </g>\n";

  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k].curve;
    std::string d;
    for (std::size_t i = 0; i < c.grid.size(); ++i)
      d += (i ? " L" : "M") + num(px(c.grid[i])) + " " + num(py(c.density[i]));
    s += "  <path fill=\"none\" stroke=\"" + std::string(colors[k % colors.size()]) + "\" stroke-width=\"2\" d=\"" + d +
         "\"/>\n";
  }

  s += "  <g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const double y = top + 12 + 18.0 * static_cast<double>(k);
    const double x = left + plot_w - 150;
    s += "    <line x1=\"" + num(x) + "\" y1=\"" + num(y) + "\" x2=\"" + num(x + 24) + "\" y2=\"" + num(y) +
         "\" stroke=\"" + colors[k % colors.size()] + "\" stroke-width=\"2\"/>\n";
    s += "    <text x=\"" + num(x + 30) + "\" y=\"" + num(y + 4) + "\">" + svg_detail::escape(curves[k].label) +
         "</text>\n";
  }
  s += "  </g>\n</svg>\n";
  return s;
}

}  // namespace cfair
