#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mcsd {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label = "iteration";
  std::string y_label;
  bool log_y = false;
  int width = 720;
  int height = 440;
};

/// Self-contained SVG line chart with axes, ticks and a legend. On a log
/// axis, nonpositive values are dropped from the polyline.
std::string render_line_chart(const std::vector<Series>& series, const ChartOptions& options);

void write_line_chart(const std::filesystem::path& path, const std::vector<Series>& series,
                      const ChartOptions& options);

}  // namespace mcsd
