#include "globtop/svg.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "globtop/error.hpp"

namespace globtop {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
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

// Round the span outwards to a "nice" step so tick labels stay short.
double nice_step(double span) {
  const double raw = span / 5.0;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * magnitude >= raw) return m * magnitude;
  }
  return 10.0 * magnitude;
}

}  // namespace

std::string render_svg(const LinePlot& plot) {
  if (plot.points.size() < 2) {
    throw DomainError("line plot needs at least two points");
  }
  double x_min = plot.points.front().first;
  double x_max = x_min;
  double y_min = 0.0;
  double y_max = plot.points.front().second;
  for (const auto& [x, y] : plot.points) {
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
  if (plot.horizontal_rule) {
    y_max = std::max(y_max, *plot.horizontal_rule);
    y_min = std::min(y_min, *plot.horizontal_rule);
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) y_max = y_min + 1.0;
  const double y_step = nice_step(y_max - y_min);
  y_max = std::ceil(y_max / y_step) * y_step;
  y_min = std::floor(y_min / y_step) * y_step;
  const double x_step = nice_step(x_max - x_min);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * plot_h; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
      "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight);
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", kWidth,
                     kHeight);
  svg += fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     kWidth / 2.0, escape(plot.title));
  svg += fmt::format(
      "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" stroke=\"black\"/>\n",
      kLeft, kTop, plot_w, plot_h);

  for (double y = y_min; y <= y_max + 0.5 * y_step; y += y_step) {
    svg += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"#dddddd\"/>\n"
        "<text x=\"{3:.1f}\" y=\"{4:.1f}\" text-anchor=\"end\">{5:g}</text>\n",
        kLeft, py(y), kLeft + plot_w, kLeft - 6.0, py(y) + 4.0, y);
  }
  const double x_first = std::ceil(x_min / x_step) * x_step;
  for (double x = x_first; x <= x_max + 1e-9 * x_step; x += x_step) {
    svg += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"#dddddd\"/>\n"
        "<text x=\"{0:.1f}\" y=\"{3:.1f}\" text-anchor=\"middle\">{4:g}</text>\n",
        px(x), kTop, kTop + plot_h, kTop + plot_h + 18.0, x);
  }
  svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + plot_w / 2.0, kHeight - 12.0, escape(plot.x_label));
  svg += fmt::format(
      "<text x=\"16\" y=\"{0:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.1f})\">{1}</text>\n",
      kTop + plot_h / 2.0, escape(plot.y_label));

  if (plot.horizontal_rule) {
    const double y = py(*plot.horizontal_rule);
    svg += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"#c0392b\" "
        "stroke-dasharray=\"6 4\"/>\n"
        "<text x=\"{3:.1f}\" y=\"{4:.1f}\" text-anchor=\"end\" fill=\"#c0392b\">{5}</text>\n",
        kLeft, y, kLeft + plot_w, kLeft + plot_w - 4.0, y - 5.0, escape(plot.rule_label));
  }

  svg += "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < plot.points.size(); ++i) {
    svg += fmt::format("{}{:.2f},{:.2f}", i == 0 ? "" : " ", px(plot.points[i].first),
                       py(plot.points[i].second));
  }
  svg += "\"/>\n</svg>\n";
  return svg;
}

}  // namespace globtop
