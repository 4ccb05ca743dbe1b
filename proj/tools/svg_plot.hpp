#pragma once

#include <string>
#include <vector>

namespace geodepth::cli {

struct Series {
  std::string name;
  std::vector<double> y;
};

struct Figure {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<Series> series;
};

/// Line chart as a standalone SVG document.
std::string render_svg(const Figure& fig);

/// Data twin of the chart: header "x_label,series..." then one row per x.
std::string figure_csv(const Figure& fig);

}  // namespace geodepth::cli
