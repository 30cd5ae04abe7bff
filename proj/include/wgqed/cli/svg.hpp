#pragma once

#include <string>
#include <vector>

namespace wgqed::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Static SVG 1.1 line chart with axes, ticks and a legend.
std::string render_svg(const LinePlot& plot);

}  // namespace wgqed::cli
