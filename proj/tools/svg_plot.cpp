#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace geodepth::cli {

namespace {

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string num(double v, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// Padded [lo, hi] with both ends finite and distinct.
std::pair<double, double> range(const std::vector<double>& v) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : v) {
    if (!std::isfinite(x)) continue;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  return {lo, hi};
}

}  // namespace

std::string render_svg(const Figure& fig) {
  const double w = 640, h = 420, left = 70, right = 160, top = 40, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  const auto [x0, x1] = range(fig.x);
  std::vector<double> all_y;
  for (const auto& s : fig.series) all_y.insert(all_y.end(), s.y.begin(), s.y.end());
  auto [y0, y1] = range(all_y);
  y0 = std::min(y0, 0.0);
  const auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  const auto sy = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" +
         num(h) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(left) + "\" y=\"22\" font-size=\"15\">" + escape(fig.title) +
         "</text>\n";
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) +
         "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    out += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(top + ph + 16) +
           "\" text-anchor=\"middle\">" + num(xv, "%.3g") + "</text>\n";
    out += "<text x=\"" + num(left - 6) + "\" y=\"" + num(sy(yv) + 4) +
           "\" text-anchor=\"end\">" + num(yv, "%.3g") + "</text>\n";
    out += "<line x1=\"" + num(left) + "\" x2=\"" + num(left + pw) + "\" y1=\"" + num(sy(yv)) +
           "\" y2=\"" + num(sy(yv)) + "\" stroke=\"#ddd\"/>\n";
  }
  out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(h - 12) +
         "\" text-anchor=\"middle\">" + escape(fig.x_label) + "</text>\n";
  out += "<text transform=\"translate(16," + num(top + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(fig.y_label) + "</text>\n";

  for (std::size_t s = 0; s < fig.series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    std::string points;
    for (std::size_t i = 0; i < fig.x.size() && i < fig.series[s].y.size(); ++i) {
      const double y = fig.series[s].y[i];
      if (!std::isfinite(y)) continue;
      points += num(sx(fig.x[i])) + "," + num(sy(y)) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    const double ly = top + 14 + 18 * static_cast<double>(s);
    out += "<line x1=\"" + num(left + pw + 12) + "\" x2=\"" + num(left + pw + 32) + "\" y1=\"" +
           num(ly) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(left + pw + 38) + "\" y=\"" + num(ly + 4) + "\">" +
           escape(fig.series[s].name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string figure_csv(const Figure& fig) {
  std::string out = fig.x_label;
  for (const auto& s : fig.series) out += "," + s.name;
  out += "\n";
  for (std::size_t i = 0; i < fig.x.size(); ++i) {
    out += num(fig.x[i], "%.6f");
    for (const auto& s : fig.series) {
      out += ",";
      if (i < s.y.size() && std::isfinite(s.y[i])) out += num(s.y[i], "%.6f");
    }
    out += "\n";
  }
  return out;
}

}  // namespace geodepth::cli
