#pragma once
// Dependency-free SVG line charts for run outputs.

#include <filesystem>
#include <string>
#include <vector>

namespace sentinet {

struct PlotSeries {
  std::string name;
  std::string color;  // css color
  std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;  // log10 axis; points with y <= 0 are clamped to the floor
  int width = 860;
  int height = 460;
};

void write_svg_chart(const std::filesystem::path& path,
                     const std::vector<PlotSeries>& series, const PlotOptions& opt);

}  // namespace sentinet
