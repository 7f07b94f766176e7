#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace globtop {

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
  std::optional<double> horizontal_rule;  // y value
  std::string rule_label;
};

/// Self-contained SVG document; output depends only on the input values.
std::string render_svg(const LinePlot& plot);

}  // namespace globtop
