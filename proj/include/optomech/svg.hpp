#pragma once

// Minimal self-contained SVG rendering: a line plot and a grid heatmap are
// all the sweep commands need. Output is deterministic (fixed precision,
// fixed element order) so repeated runs are byte-identical.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "optomech/core.hpp"

namespace optomech::svg {

namespace detail {

inline std::string num(double x) {
  if (x == 0.0) return "0";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return std::string(buf);
}

struct Frame {
  double width = 720.0, height = 480.0;
  double left = 72.0, right = 24.0, top = 28.0, bottom = 52.0;
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;

  double px(double x) const {
    return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right);
  }
  double py(double y) const {
    return height - bottom -
           (y - y_lo) / (y_hi - y_lo) * (height - top - bottom);
  }
};

inline void open_document(std::ostream& os, const Frame& f,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(f.width)
     << "\" height=\"" << num(f.height) << "\" viewBox=\"0 0 " << num(f.width)
     << " " << num(f.height) << "\">\n";
  os << "<rect width=\"" << num(f.width) << "\" height=\"" << num(f.height)
     << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(f.width / 2) << "\" y=\"18\" font-family=\"sans-serif\" "
     << "font-size=\"14\" text-anchor=\"middle\">" << title << "</text>\n";
  os << "<text x=\"" << num(f.width / 2) << "\" y=\"" << num(f.height - 12)
     << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
     << x_label << "</text>\n";
  os << "<text x=\"16\" y=\"" << num(f.height / 2)
     << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
     << "transform=\"rotate(-90 16 " << num(f.height / 2) << ")\">" << y_label
     << "</text>\n";
}

inline void draw_axes(std::ostream& os, const Frame& f) {
  // Axis box plus four tick labels per axis; enough to read values off the
  // plot without a tick-placement algorithm whose output could wobble.
  os << "<rect x=\"" << num(f.left) << "\" y=\"" << num(f.top) << "\" width=\""
     << num(f.width - f.left - f.right) << "\" height=\""
     << num(f.height - f.top - f.bottom)
     << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double tx = f.x_lo + (f.x_hi - f.x_lo) * i / 4.0;
    const double ty = f.y_lo + (f.y_hi - f.y_lo) * i / 4.0;
    os << "<text x=\"" << num(f.px(tx)) << "\" y=\""
       << num(f.height - f.bottom + 16)
       << "\" font-family=\"sans-serif\" font-size=\"10\" "
          "text-anchor=\"middle\">"
       << num(tx) << "</text>\n";
    os << "<text x=\"" << num(f.left - 6) << "\" y=\"" << num(f.py(ty) + 3)
       << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
       << num(ty) << "</text>\n";
  }
}

}  // namespace detail

struct Series {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<double> x;
  std::vector<double> y;  // NaN breaks the line (e.g. unstable gaps)
};

inline void line_plot(std::ostream& os, const std::vector<Series>& series,
                      const std::string& title, const std::string& x_label,
                      const std::string& y_label) {
  detail::Frame f;
  bool any = false;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      if (!any) {
        f.x_lo = f.x_hi = s.x[i];
        f.y_lo = f.y_hi = s.y[i];
        any = true;
      }
      f.x_lo = std::min(f.x_lo, s.x[i]);
      f.x_hi = std::max(f.x_hi, s.x[i]);
      f.y_lo = std::min(f.y_lo, s.y[i]);
      f.y_hi = std::max(f.y_hi, s.y[i]);
    }
  if (!any) throw ConfigError("line plot needs at least one finite point");
  if (f.x_hi == f.x_lo) f.x_hi = f.x_lo + 1.0;
  if (f.y_hi == f.y_lo) f.y_hi = f.y_lo + 1.0;
  const double pad = 0.04 * (f.y_hi - f.y_lo);
  f.y_lo -= pad;
  f.y_hi += pad;

  detail::open_document(os, f, title, x_label, y_label);
  detail::draw_axes(os, f);
  double legend_y = f.top + 14.0;
  for (const auto& s : series) {
    std::string d;
    bool pen_down = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) {
        pen_down = false;
        continue;
      }
      d += pen_down ? " L " : (d.empty() ? "M " : " M ");
      d += detail::num(f.px(s.x[i])) + " " + detail::num(f.py(s.y[i]));
      pen_down = true;
    }
    if (!d.empty())
      os << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << s.color
         << "\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << detail::num(f.width - f.right - 8) << "\" y=\""
       << detail::num(legend_y) << "\" font-family=\"sans-serif\" "
       << "font-size=\"11\" text-anchor=\"end\" fill=\"" << s.color << "\">"
       << s.label << "</text>\n";
    legend_y += 14.0;
  }
  os << "</svg>\n";
}

// values[row][col]; rows map to the y axis (first row at y_lo), columns to
// the x axis. Cells with NaN are drawn in gray (e.g. unstable points).
inline void heatmap(std::ostream& os,
                    const std::vector<std::vector<double>>& values,
                    double x_lo, double x_hi, double y_lo, double y_hi,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label) {
  if (values.empty() || values.front().empty())
    throw ConfigError("heatmap needs a non-empty grid");
  const int n_rows = static_cast<int>(values.size());
  const int n_cols = static_cast<int>(values.front().size());
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto& row : values)
    for (double v : row) {
      if (!std::isfinite(v)) continue;
      if (!any) {
        lo = hi = v;
        any = true;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!any) throw ConfigError("heatmap needs at least one finite value");
  if (hi == lo) hi = lo + 1.0;

  detail::Frame f;
  f.x_lo = x_lo;
  f.x_hi = x_hi;
  f.y_lo = y_lo;
  f.y_hi = y_hi;
  detail::open_document(os, f, title, x_label, y_label);
  const double cw = (f.width - f.left - f.right) / n_cols;
  const double ch = (f.height - f.top - f.bottom) / n_rows;
  for (int r = 0; r < n_rows; ++r) {
    for (int c = 0; c < n_cols; ++c) {
      const double v = values[r][c];
      std::string fill = "#b0b0b0";
      if (std::isfinite(v)) {
        // Two-ramp blue-white-red map centred on the midpoint.
        const double t = (v - lo) / (hi - lo);
        const auto chan = [](double u) {
          const int c255 = static_cast<int>(std::lround(255.0 * u));
          char buf[8];
          std::snprintf(buf, sizeof(buf), "%02x", std::clamp(c255, 0, 255));
          return std::string(buf);
        };
        if (t < 0.5)
          fill = "#" + chan(2.0 * t) + chan(2.0 * t) + chan(1.0);
        else
          fill = "#" + chan(1.0) + chan(2.0 - 2.0 * t) + chan(2.0 - 2.0 * t);
      }
      const double x = f.left + c * cw;
      const double y = f.height - f.bottom - (r + 1) * ch;
      os << "<rect x=\"" << detail::num(x) << "\" y=\"" << detail::num(y)
         << "\" width=\"" << detail::num(cw + 0.5) << "\" height=\""
         << detail::num(ch + 0.5) << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  detail::draw_axes(os, f);
  os << "<text x=\"" << detail::num(f.width - f.right) << "\" y=\"18\" "
     << "font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
     << "range [" << detail::num(lo) << ", " << detail::num(hi) << "]"
     << "</text>\n";
  os << "</svg>\n";
}

}  // namespace optomech::svg
