#include "qtrack/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace qtrack {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 30;
constexpr int kMarginTop = 50;
constexpr int kMarginBottom = 60;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                         "#9467bd", "#8c564b"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (!(lo <= hi)) { lo = 0; hi = 1; }
    if (lo == hi) { lo -= 0.5; hi += 0.5; }
  }
};

double map_x(double v, const Range& r) {
  return kMarginLeft + (v - r.lo) / (r.hi - r.lo) *
                           (kWidth - kMarginLeft - kMarginRight);
}

double map_y(double v, const Range& r) {
  return kHeight - kMarginBottom -
         (v - r.lo) / (r.hi - r.lo) * (kHeight - kMarginTop - kMarginBottom);
}

void open_svg(std::ofstream& f, const std::filesystem::path& path,
              const std::string& title) {
  f.open(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
    << "\" height=\"" << kHeight << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<text x=\"" << kWidth / 2 << "\" y=\"25\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"18\">" << title << "</text>\n";
}

void draw_axes(std::ofstream& f, const Range& xr, const Range& yr,
               const std::string& x_label, const std::string& y_label) {
  const int x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const int y0 = kHeight - kMarginBottom, y1 = kMarginTop;
  f << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1
    << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0
    << "\" y2=\"" << y1 << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xr.lo + (xr.hi - xr.lo) * i / 5.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * i / 5.0;
    f << "<text x=\"" << map_x(xv, xr) << "\" y=\"" << y0 + 20
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"11\">" << xv << "</text>\n";
    f << "<text x=\"" << x0 - 8 << "\" y=\"" << map_y(yv, yr) + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"11\">" << yv << "</text>\n";
  }
  f << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 15
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"14\">" << x_label << "</text>\n";
  f << "<text x=\"18\" y=\"" << (y0 + y1) / 2
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
       "transform=\"rotate(-90 18 " << (y0 + y1) / 2 << ")\">" << y_label
    << "</text>\n";
}

}  // namespace

void write_line_chart_svg(const std::filesystem::path& path,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label,
                          std::span<const Series> series) {
  Range xr, yr;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      xr.add(x);
      yr.add(y);
    }
  xr.pad();
  yr.pad();

  std::ofstream f;
  open_svg(f, path, title);
  draw_axes(f, xr, yr, x_label, y_label);
  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kColors[si % 6];
    f << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[si].points)
      if (std::isfinite(y)) f << map_x(x, xr) << ',' << map_y(y, yr) << ' ';
    f << "\"/>\n";
    if (!series[si].label.empty())
      f << "<text x=\"" << kWidth - kMarginRight - 10 << "\" y=\""
        << kMarginTop + 16 * (si + 1) << "\" text-anchor=\"end\" fill=\""
        << color << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << series[si].label << "</text>\n";
  }
  f << "</svg>\n";
  if (!f.good()) throw std::runtime_error("write failed: " + path.string());
}

void write_histogram_svg(const std::filesystem::path& path,
                         const std::string& title,
                         std::span<const double> values, int n_bins) {
  Range vr;
  for (double v : values) vr.add(v);
  vr.pad();
  std::vector<double> counts(n_bins, 0.0);
  for (double v : values) {
    int b = static_cast<int>((v - vr.lo) / (vr.hi - vr.lo) * n_bins);
    b = std::min(std::max(b, 0), n_bins - 1);
    counts[b] += 1.0;
  }
  Range yr;
  yr.add(0.0);
  for (double c : counts) yr.add(c);
  yr.pad();

  std::ofstream f;
  open_svg(f, path, title);
  draw_axes(f, vr, yr, "value", "count");
  const double bin_w = (vr.hi - vr.lo) / n_bins;
  for (int b = 0; b < n_bins; ++b) {
    const double x = map_x(vr.lo + b * bin_w, vr);
    const double x2 = map_x(vr.lo + (b + 1) * bin_w, vr);
    const double y = map_y(counts[b], yr);
    const double y0 = map_y(0.0, yr);
    f << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << (x2 - x)
      << "\" height=\"" << (y0 - y)
      << "\" fill=\"#1f77b4\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
  }
  f << "</svg>\n";
  if (!f.good()) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace qtrack
