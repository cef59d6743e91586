#pragma once

// Minimal self-contained SVG line charts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ptlattice::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
  bool markers = false;
  double width = 1.5;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::optional<double> y_min;
  std::optional<double> y_max;
  std::vector<Series> series;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '<':
      out += "&lt;";
      break;
    case '>':
      out += "&gt;";
      break;
    case '&':
      out += "&amp;";
      break;
    default:
      out += c;
    }
  }
  return out;
}

inline std::vector<double> ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  if (!(span > 0.0))
    return {lo};
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (span / step <= target)
      break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

} // namespace detail

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  return colors;
}

inline std::string render(const Chart& chart, int width = 720, int height = 480) {
  const double left = 80, right = 20, top = 40, bottom = 60;
  const double pw = width - left - right;
  const double ph = height - top - bottom;

  auto tx = [&](double x) { return chart.log_x ? std::log10(x) : x; };

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : chart.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (chart.log_x && s.x[i] <= 0.0))
        continue;
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (chart.y_min)
    ymin = *chart.y_min;
  if (chart.y_max)
    ymax = *chart.y_max;
  if (xmax == xmin)
    xmax = xmin + 1.0;
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  } else if (!chart.y_min && !chart.y_max) {
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
  }

  auto px = [&](double x) { return left + (tx(x) - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << width << R"(" height=")" << height
     << R"(" font-family="sans-serif" font-size="12">)" << '\n';
  os << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
  os << R"(<text x=")" << width / 2 << R"(" y="22" text-anchor="middle" font-size="14">)"
     << detail::escape(chart.title) << "</text>\n";
  os << R"(<rect x=")" << left << R"(" y=")" << top << R"(" width=")" << pw << R"(" height=")" << ph
     << R"(" fill="none" stroke="black"/>)" << '\n';

  for (double t : detail::ticks(xmin, xmax)) {
    const double x = left + (t - xmin) / (xmax - xmin) * pw;
    const std::string label = chart.log_x ? "1e" + detail::fmt(t) : detail::fmt(t);
    os << R"(<line x1=")" << x << R"(" y1=")" << top + ph << R"(" x2=")" << x << R"(" y2=")" << top + ph + 5
       << R"(" stroke="black"/>)";
    os << R"(<text x=")" << x << R"(" y=")" << top + ph + 18 << R"(" text-anchor="middle">)" << label
       << "</text>\n";
  }
  for (double t : detail::ticks(ymin, ymax)) {
    const double y = py(t);
    os << R"(<line x1=")" << left - 5 << R"(" y1=")" << y << R"(" x2=")" << left << R"(" y2=")" << y
       << R"(" stroke="black"/>)";
    os << R"(<text x=")" << left - 8 << R"(" y=")" << y + 4 << R"(" text-anchor="end">)" << detail::fmt(t)
       << "</text>\n";
  }
  os << R"(<text x=")" << left + pw / 2 << R"(" y=")" << height - 15 << R"(" text-anchor="middle">)"
     << detail::escape(chart.x_label) << "</text>\n";
  os << R"(<text x="18" y=")" << top + ph / 2 << R"x(" text-anchor="middle" transform="rotate(-90 18 )x"
     << top + ph / 2 << R"x()">)x" << detail::escape(chart.y_label) << "</text>\n";

  os << R"(<clipPath id="plot"><rect x=")" << left << R"(" y=")" << top << R"(" width=")" << pw
     << R"(" height=")" << ph << R"("/></clipPath>)" << '\n';
  for (const auto& s : chart.series) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (chart.log_x && s.x[i] <= 0.0))
        continue;
      pts << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    os << R"x(<polyline clip-path="url(#plot)" fill="none" stroke=")x" << s.color << R"(" stroke-width=")"
       << s.width << '"' << (s.dashed ? R"( stroke-dasharray="6,4")" : "") << R"( points=")" << pts.str()
       << R"("/>)" << '\n';
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
          continue;
        os << R"x(<circle clip-path="url(#plot)" cx=")x" << px(s.x[i]) << R"(" cy=")" << py(s.y[i])
           << R"(" r="3" fill=")" << s.color << R"("/>)";
      }
      os << '\n';
    }
  }

  double ly = top + 14;
  for (const auto& s : chart.series) {
    if (s.label.empty())
      continue;
    os << R"(<line x1=")" << left + pw - 150 << R"(" y1=")" << ly - 4 << R"(" x2=")" << left + pw - 125
       << R"(" y2=")" << ly - 4 << R"(" stroke=")" << s.color << R"(" stroke-width="2")"
       << (s.dashed ? R"( stroke-dasharray="6,4")" : "") << "/>";
    os << R"(<text x=")" << left + pw - 120 << R"(" y=")" << ly << R"(">)" << detail::escape(s.label)
       << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace ptlattice::svg
