#include "cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "optcbf/error.hpp"

namespace optcbf::cli {

namespace {

constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void PlotSpec::validate() const {
  if (width <= kLeft + kRight || height <= kTop + kBottom) {
    throw ParameterError("plot dimensions too small");
  }
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw ParameterError("plot axis ranges must be nonempty");
  }
  for (const PlotSeries& s : series) {
    if (s.points.size() != series.front().points.size()) {
      throw ParameterError("plot series lengths differ");
    }
  }
}

std::string render_svg(const PlotSpec& spec) {
  spec.validate();
  const double pw = spec.width - kLeft - kRight;
  const double ph = spec.height - kTop - kBottom;
  const auto sx = [&](double x) {
    return kLeft + (x - spec.x_min) / (spec.x_max - spec.x_min) * pw;
  };
  const auto sy = [&](double y) {
    y = std::clamp(y, spec.y_min, spec.y_max);
    return kTop + (spec.y_max - y) / (spec.y_max - spec.y_min) * ph;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width
     << "\" height=\"" << spec.height << "\" viewBox=\"0 0 " << spec.width
     << ' ' << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
     << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = spec.x_min + (spec.x_max - spec.x_min) * i / kTicks;
    const double fy = spec.y_min + (spec.y_max - spec.y_min) * i / kTicks;
    const double px = sx(fx);
    const double py = sy(fy);
    os << "<line x1=\"" << num(px) << "\" y1=\"" << num(kTop + ph) << "\" x2=\""
       << num(px) << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(px) << "\" y=\"" << num(kTop + ph + 18)
       << "\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
    os << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py) << "\" x2=\""
       << num(kLeft) << "\" y2=\"" << num(py) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py + 4)
       << "\" text-anchor=\"end\">" << num(fy) << "</text>\n";
  }
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << spec.height - 10
     << "\" text-anchor=\"middle\">" << spec.x_label << "</text>\n";
  os << "<text transform=\"translate(16," << num(kTop + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << spec.y_label << "</text>\n";

  double legend_y = kTop + 16;
  for (const PlotSeries& s : spec.series) {
    os << "<polyline class=\"series\" data-name=\"" << s.name
       << "\" fill=\"none\" stroke=\"" << s.color
       << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      os << num(sx(x)) << ',' << num(sy(y)) << ' ';
    }
    os << "\"/>\n";
    os << "<line x1=\"" << num(kLeft + pw - 140) << "\" y1=\"" << num(legend_y - 4)
       << "\" x2=\"" << num(kLeft + pw - 115) << "\" y2=\"" << num(legend_y - 4)
       << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(kLeft + pw - 108) << "\" y=\"" << num(legend_y)
       << "\">" << s.name << "</text>\n";
    legend_y += 16;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace optcbf::cli
