#include "tapdoe/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace tapdoe {

namespace {

constexpr double kPanelWidth = 320.0;
constexpr double kPanelHeight = 200.0;
constexpr double kLeft = 64.0;
constexpr double kTop = 40.0;
constexpr double kGapX = 90.0;
constexpr double kGapY = 80.0;

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  double from = 0.0, to = 1.0;  // pixels
  bool log = false;

  double value(double v) const { return log ? std::log10(v) : v; }
  double map(double v) const { return from + (value(v) - value(lo)) / (value(hi) - value(lo)) * (to - from); }
  double at(int k, int n) const {
    const double t = value(lo) + k * (value(hi) - value(lo)) / n;
    return log ? std::pow(10.0, t) : t;
  }
};

Axis make_axis(double lo, double hi, bool log, double from, double to) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    lo = log ? 1.0 : 0.0;
    hi = log ? 10.0 : 1.0;
  }
  if (!(hi > lo)) {
    if (log) {
      lo *= 0.5;
      hi *= 2.0;
    } else {
      const double pad = std::max(std::abs(lo) * 0.1, 1e-12);
      lo -= pad;
      hi += pad;
    }
  }
  return {lo, hi, from, to, log};
}

void panel(std::ostringstream& svg, const Axis& ax, const Axis& ay, const std::string& title, const std::string& xl,
           const std::string& yl) {
  const double x0 = ax.from, w = ax.to - ax.from;
  const double y0 = ay.to, h = ay.from - ay.to;
  svg << "<rect x='" << x0 << "' y='" << y0 << "' width='" << w << "' height='" << h
      << "' fill='none' stroke='#333'/>\n";
  svg << "<text x='" << x0 + w / 2 << "' y='" << y0 - 8 << "' text-anchor='middle' font-size='13'>" << escape(title)
      << "</text>\n";
  svg << "<text x='" << x0 + w / 2 << "' y='" << y0 + h + 34 << "' text-anchor='middle' font-size='11'>"
      << escape(xl) << "</text>\n";
  const double lx = x0 - 48, ly = y0 + h / 2;
  svg << "<text x='" << lx << "' y='" << ly << "' text-anchor='middle' font-size='11' transform='rotate(-90 " << lx
      << " " << ly << ")'>" << escape(yl) << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double vx = ax.at(k, 4), vy = ay.at(k, 4);
    svg << "<text x='" << ax.map(vx) << "' y='" << y0 + h + 14 << "' text-anchor='middle' font-size='9'>" << tick(vx)
        << "</text>\n";
    svg << "<text x='" << x0 - 4 << "' y='" << ay.map(vy) + 3 << "' text-anchor='end' font-size='9'>" << tick(vy)
        << "</text>\n";
  }
}

}  // namespace

std::string flux_plot_svg(const FluxSeries& lines, const FluxSeries* overlay, const std::string& title) {
  const std::size_t gases = lines.gases.size();
  const std::size_t cols = std::min<std::size_t>(gases, 3);
  const std::size_t rows = gases == 0 ? 0 : (gases + cols - 1) / cols;
  const double width = kLeft + static_cast<double>(std::max<std::size_t>(cols, 1)) * (kPanelWidth + kGapX);
  const double height = kTop + static_cast<double>(rows) * (kPanelHeight + kGapY) + 20;
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "' font-family='sans-serif'>\n<rect width='100%' height='100%' fill='white'/>\n";
  if (!title.empty()) {
    svg << "<text x='" << width / 2 << "' y='20' text-anchor='middle' font-size='15'>" << escape(title) << "</text>\n";
  }
  const double t_max = lines.time.empty() ? 1.0 : lines.time.back();
  for (std::size_t g = 0; g < gases; ++g) {
    const auto col = lines.values.col(static_cast<Eigen::Index>(g));
    double lo = col.size() ? col.minCoeff() : 0.0;
    double hi = col.size() ? col.maxCoeff() : 1.0;
    Eigen::VectorXd over;
    if (overlay && g < overlay->gases.size()) {
      over = overlay->column(lines.gases[g]);
      if (over.size()) {
        lo = std::min(lo, over.minCoeff());
        hi = std::max(hi, over.maxCoeff());
      }
    }
    const double px = kLeft + static_cast<double>(g % cols) * (kPanelWidth + kGapX);
    const double py = kTop + 10 + static_cast<double>(g / cols) * (kPanelHeight + kGapY);
    const Axis ax = make_axis(0.0, t_max, false, px, px + kPanelWidth);
    const Axis ay = make_axis(std::min(lo, 0.0), hi, false, py + kPanelHeight, py);
    panel(svg, ax, ay, lines.gases[g], "time (s)", "flux (nmol/s)");
    if (over.size()) {
      // thin the markers to at most ~250 per panel
      const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(over.size()) / 250);
      for (std::size_t t = 0; t < static_cast<std::size_t>(over.size()); t += stride) {
        svg << "<circle cx='" << ax.map(overlay->time[t]) << "' cy='" << ay.map(over[static_cast<Eigen::Index>(t)])
            << "' r='1.5' fill='#222'/>\n";
      }
    }
    svg << "<polyline fill='none' stroke='#1f77b4' stroke-width='1.5' points='";
    for (std::size_t t = 0; t < lines.time.size(); ++t) {
      svg << ax.map(lines.time[t]) << "," << ay.map(col[static_cast<Eigen::Index>(t)]) << " ";
    }
    svg << "'/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string scatter_svg(const std::vector<double>& x, const std::vector<double>& y, const ScatterOptions& options) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    if ((options.log_x && x[i] <= 0.0) || (options.log_y && y[i] <= 0.0)) continue;
    xlo = std::min(xlo, x[i]);
    xhi = std::max(xhi, x[i]);
    ylo = std::min(ylo, y[i]);
    yhi = std::max(yhi, y[i]);
  }
  const double width = kLeft + kPanelWidth + 40, height = kTop + kPanelHeight + 60;
  const Axis ax = make_axis(xlo, xhi, options.log_x, kLeft, kLeft + kPanelWidth);
  const Axis ay = make_axis(ylo, yhi, options.log_y, kTop + kPanelHeight, kTop);
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "' font-family='sans-serif'>\n<rect width='100%' height='100%' fill='white'/>\n";
  panel(svg, ax, ay, options.title, options.x_label, options.y_label);
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    if ((options.log_x && x[i] <= 0.0) || (options.log_y && y[i] <= 0.0)) continue;
    svg << "<circle cx='" << ax.map(x[i]) << "' cy='" << ay.map(y[i]) << "' r='3' fill='#d62728' fill-opacity='0.7'/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace tapdoe
