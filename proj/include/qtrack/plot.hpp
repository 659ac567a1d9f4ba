#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qtrack {

// Self-contained SVG line chart, one polyline per series.
struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

void write_line_chart_svg(const std::filesystem::path& path,
                          const std::string& title,
                          const std::string& x_label,
                          const std::string& y_label,
                          std::span<const Series> series);

// SVG bar-chart histogram, 50 uniform bins by default.
void write_histogram_svg(const std::filesystem::path& path,
                         const std::string& title,
                         std::span<const double> values, int n_bins = 50);

}  // namespace qtrack
