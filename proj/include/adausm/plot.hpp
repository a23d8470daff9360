#pragma once

#include <span>
#include <string>
#include <vector>

namespace adausm {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

struct PlotOptions {
  std::string title;
  std::string xlabel = "t";
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
  int width = 960;
  int height = 600;
};

// Self-contained SVG line chart. Non-finite points are skipped, as are
// non-positive ones on a log axis. Throws std::invalid_argument when nothing
// remains to draw.
std::string render_svg(std::span<const PlotSeries> series, const PlotOptions& opt);

// Plain-text fallback: one row per distinct x, one column per series, "-"
// where a series has no value at that x.
std::string render_table(std::span<const PlotSeries> series, const PlotOptions& opt);

}  // namespace adausm
