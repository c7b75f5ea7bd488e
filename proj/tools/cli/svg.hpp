#pragma once

#include <string>
#include <utility>
#include <vector>

namespace optcbf::cli {

struct PlotSeries {
  std::string name;
  std::string color;
  std::vector<std::pair<double, double>> points;  // (b, upper bound)
};

struct PlotSpec {
  int width = 720;
  int height = 440;
  double x_min = -1.0;
  double x_max = 0.0;
  double y_min = -1.0;
  double y_max = 1.0;
  std::string x_label = "b";
  std::string y_label = "upper control bound";
  std::vector<PlotSeries> series;

  // Throws ParameterError on empty ranges or series of unequal length.
  void validate() const;
};

// Standalone SVG document: axes, ticks, one polyline per series, a legend.
// Points outside the y range are clipped to it.
std::string render_svg(const PlotSpec& spec);

}  // namespace optcbf::cli
