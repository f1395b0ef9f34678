#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mmv2v/csv.hpp"
#include "mmv2v/errors.hpp"

namespace mmv2v {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool step = false;  // render as a staircase (empirical CDFs)
};

struct Panel {
  std::string y_label;
  std::vector<Series> series;
};

namespace detail {

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors{
      "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
      "#8c564b", "#17becf", "#e377c2", "#7f7f7f", "#bcbd22"};
  return colors;
}

struct Ticks {
  double lo, hi, step;
};

// Expands [lo, hi] to rounded bounds with a 1/2/5 tick step.
inline Ticks nice_ticks(double lo, double hi) {
  if (!(hi > lo)) hi = lo + 1.0;
  const double span = hi - lo;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) { step = m * mag; break; }
  }
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

inline std::string fmt(double v) {
  // Avoid "-0" labels.
  if (v == 0.0) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace detail

// Renders stacked panels sharing one x axis into a self-contained SVG
// document. Output is a pure function of the inputs.
inline std::string render_chart(const std::string& title, const std::string& x_label,
                                const std::vector<Panel>& panels) {
  if (panels.empty()) throw IoError("nothing to plot");
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  bool any_point = false;
  for (const auto& p : panels)
    for (const auto& s : p.series)
      for (const auto& [x, y] : s.points) {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        any_point = true;
      }
  if (!any_point) throw IoError("nothing to plot: no data points");

  const int width = 860;
  const int panel_height = 300;
  const int margin_left = 70, margin_right = 170, margin_top = 40, margin_bottom = 50;
  const int height = margin_top + margin_bottom +
                     panel_height * static_cast<int>(panels.size());
  const auto xt = detail::nice_ticks(x_min, x_max);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << title << "</text>\n";

  const double plot_w = width - margin_left - margin_right;
  const auto x_pos = [&](double x) {
    return margin_left + (x - xt.lo) / (xt.hi - xt.lo) * plot_w;
  };

  int color_index = 0;
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& panel = panels[pi];
    const int top = margin_top + static_cast<int>(pi) * panel_height;
    const int bottom = top + panel_height - 40;
    const double plot_h = bottom - top;

    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -y_min;
    for (const auto& s : panel.series)
      for (const auto& [x, y] : s.points) {
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
    if (!(y_max > y_min)) { y_max = y_min + 1.0; y_min -= 1.0; }
    const auto yt = detail::nice_ticks(y_min, y_max);
    const auto y_pos = [&](double y) {
      return bottom - (y - yt.lo) / (yt.hi - yt.lo) * plot_h;
    };

    // Frame and grid.
    svg << "<rect x=\"" << margin_left << "\" y=\"" << top << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (double gx = xt.lo; gx <= xt.hi + 1e-9; gx += xt.step) {
      svg << "<line x1=\"" << x_pos(gx) << "\" y1=\"" << top << "\" x2=\"" << x_pos(gx)
          << "\" y2=\"" << bottom << "\" stroke=\"#ddd\"/>\n";
      svg << "<text x=\"" << x_pos(gx) << "\" y=\"" << bottom + 16
          << "\" text-anchor=\"middle\">" << detail::fmt(gx) << "</text>\n";
    }
    for (double gy = yt.lo; gy <= yt.hi + 1e-9; gy += yt.step) {
      svg << "<line x1=\"" << margin_left << "\" y1=\"" << y_pos(gy) << "\" x2=\""
          << margin_left + plot_w << "\" y2=\"" << y_pos(gy) << "\" stroke=\"#ddd\"/>\n";
      svg << "<text x=\"" << margin_left - 6 << "\" y=\"" << y_pos(gy) + 4
          << "\" text-anchor=\"end\">" << detail::fmt(gy) << "</text>\n";
    }
    svg << "<text x=\"18\" y=\"" << (top + bottom) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << (top + bottom) / 2
        << ")\">" << panel.y_label << "</text>\n";

    // Series plus legend entries.
    for (std::size_t si = 0; si < panel.series.size(); ++si) {
      const Series& s = panel.series[si];
      const std::string& color =
          detail::palette()[color_index++ % detail::palette().size()];
      std::ostringstream pts;
      bool first = true;
      double prev_y = 0.0;
      for (const auto& [x, y] : s.points) {
        if (s.step && !first) pts << format_double(x_pos(x)) << "," << format_double(y_pos(prev_y)) << " ";
        pts << format_double(x_pos(x)) << "," << format_double(y_pos(y)) << " ";
        prev_y = y;
        first = false;
      }
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.6\" points=\"" << pts.str() << "\"/>\n";
      const int ly = top + 14 + static_cast<int>(si) * 18;
      svg << "<line x1=\"" << margin_left + plot_w + 10 << "\" y1=\"" << ly
          << "\" x2=\"" << margin_left + plot_w + 34 << "\" y2=\"" << ly
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << margin_left + plot_w + 40 << "\" y=\"" << ly + 4 << "\">"
          << s.name << "</text>\n";
    }
  }
  svg << "<text x=\"" << margin_left + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace mmv2v
