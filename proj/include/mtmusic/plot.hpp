#pragma once

#include <string>
#include <vector>

#include "mtmusic/influence.hpp"

namespace mtmusic {

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<ChartSeries> series;
};

/// Standalone SVG line chart with axes, ticks and a legend. Points that are
/// not finite (or not positive on a log axis) are skipped.
std::string render_svg_chart(const ChartSpec& spec);

/// Influence-function norm curves on log-log axes.
std::string render_if_plot(const IfCurve& curve);

/// Escapes &, <, >, " and ' for XML text and attributes.
std::string xml_escape(const std::string& s);

}  // namespace mtmusic
