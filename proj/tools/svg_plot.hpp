#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

// Minimal SVG writers for quick-look figures. The CSV written next to each
// plot is the authoritative output.
namespace svg {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

class Canvas {
 public:
  Canvas(double x_min, double x_max, double y_min, double y_max)
      : x0_(x_min), x1_(x_max == x_min ? x_min + 1 : x_max), y0_(y_min), y1_(y_max == y_min ? y_min + 1 : y_max) {}

  double px(double x) const { return kMargin + (x - x0_) / (x1_ - x0_) * kPlot; }
  double py(double y) const { return kMargin + kPlot - (y - y0_) / (y1_ - y0_) * kPlot; }

  void add(const std::string& element) { body_ += element + "\n"; }

  void write(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
             const std::string& y_label) const {
    std::ofstream out(path);
    const double size = kPlot + 2 * kMargin;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kPlot << "\" height=\"" << kPlot
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << size / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    out << "<text x=\"" << size / 2 << "\" y=\"" << size - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
        << x_label << " [" << fmt(x0_) << ", " << fmt(x1_) << "]</text>\n";
    out << "<text x=\"14\" y=\"" << size / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
        << size / 2 << ")\">" << y_label << " [" << fmt(y0_) << ", " << fmt(y1_) << "]</text>\n";
    out << body_ << "</svg>\n";
  }

  static constexpr double kMargin = 50;
  static constexpr double kPlot = 400;

 private:
  double x0_, x1_, y0_, y1_;
  std::string body_;
};

inline void scatter(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (double v : s.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
    for (double v : s.y) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
  }
  if (xmin > xmax) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  Canvas c(xmin, xmax, ymin, ymax);
  double legend_y = Canvas::kMargin + 15;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      c.add("<circle cx=\"" + fmt(c.px(s.x[i])) + "\" cy=\"" + fmt(c.py(s.y[i])) + "\" r=\"2\" fill=\"" + s.color +
            "\" fill-opacity=\"0.6\"/>");
    }
    if (!s.label.empty()) {
      c.add("<text x=\"" + fmt(Canvas::kMargin + 10) + "\" y=\"" + fmt(legend_y) + "\" font-size=\"11\" fill=\"" +
            s.color + "\">" + s.label + "</text>");
      legend_y += 14;
    }
  }
  c.write(path, title, x_label, y_label);
}

/// Overlaid step histograms with shared bin edges; counts are normalized to densities.
inline void histograms(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                       const std::vector<double>& edges, const std::vector<Series>& series) {
  double ymax = 0;
  for (const auto& s : series)
    for (double v : s.y) ymax = std::max(ymax, v);
  Canvas c(edges.front(), edges.back(), 0, ymax > 0 ? ymax : 1);
  double legend_y = Canvas::kMargin + 15;
  for (const auto& s : series) {
    std::string points;
    for (std::size_t i = 0; i + 1 < edges.size() && i < s.y.size(); ++i) {
      points += fmt(c.px(edges[i])) + "," + fmt(c.py(s.y[i])) + " " + fmt(c.px(edges[i + 1])) + "," +
                fmt(c.py(s.y[i])) + " ";
    }
    c.add("<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + s.color + "\"/>");
    c.add("<text x=\"" + fmt(Canvas::kMargin + 10) + "\" y=\"" + fmt(legend_y) + "\" font-size=\"11\" fill=\"" +
          s.color + "\">" + s.label + "</text>");
    legend_y += 14;
  }
  c.write(path, title, x_label, "density");
}

}  // namespace svg
