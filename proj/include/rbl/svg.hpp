#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "rbl/cache.hpp"
#include "rbl/error.hpp"

namespace rbl {

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct ChartOptions {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_y = false;
  int width = 640, height = 400;
};

namespace detail {

inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace detail

/// Line chart as SVG text; identical input gives identical bytes.
inline std::string render_svg(const std::vector<Series>& series, const ChartOptions& opt = {}) {
  require(!series.empty(), ErrorKind::io, "chart needs at least one series");
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto ty = [&](double v) { return opt.log_y ? std::log10(v) : v; };
  for (const auto& s : series) {
    require(!s.x.empty() && s.x.size() == s.y.size(), ErrorKind::io, "series '" + s.name + "' is empty or ragged");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      require(!opt.log_y || s.y[i] > 0, ErrorKind::io, "log scale needs positive values");
      x0 = std::min(x0, s.x[i]), x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i])), y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad, y1 += pad;
  const double L = 70, R = 150, T = 40, B = 50;
  const double W = opt.width - L - R, H = opt.height - T - B;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * W; };
  auto py = [&](double y) { return T + (1 - (ty(y) - y0) / (y1 - y0)) * H; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  using detail::fmt_num;
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.width) + "\" height=\"" +
       std::to_string(opt.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt_num(L + W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       detail::xml_escape(opt.title) + "</text>\n";
  s += "<rect x=\"" + fmt_num(L) + "\" y=\"" + fmt_num(T) + "\" width=\"" + fmt_num(W) + "\" height=\"" + fmt_num(H) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    const double gx = L + W * k / 4, gy = T + H * (1 - k / 4.0);
    s += "<line x1=\"" + fmt_num(gx) + "\" y1=\"" + fmt_num(T + H) + "\" x2=\"" + fmt_num(gx) + "\" y2=\"" +
         fmt_num(T + H + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt_num(gx) + "\" y=\"" + fmt_num(T + H + 18) + "\" text-anchor=\"middle\">" + fmt_num(xv) +
         "</text>\n";
    s += "<line x1=\"" + fmt_num(L - 5) + "\" y1=\"" + fmt_num(gy) + "\" x2=\"" + fmt_num(L) + "\" y2=\"" +
         fmt_num(gy) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt_num(L - 8) + "\" y=\"" + fmt_num(gy + 4) + "\" text-anchor=\"end\">" +
         fmt_num(opt.log_y ? std::pow(10.0, yv) : yv) + "</text>\n";
  }
  s += "<text x=\"" + fmt_num(L + W / 2) + "\" y=\"" + fmt_num(opt.height - 10.0) + "\" text-anchor=\"middle\">" +
       detail::xml_escape(opt.x_label) + "</text>\n";
  s += "<text transform=\"translate(16," + fmt_num(T + H / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       detail::xml_escape(opt.y_label + (opt.log_y ? " (log)" : "")) + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& sr = series[k];
    const char* col = colors[k % 6];
    std::string pts;
    for (std::size_t i = 0; i < sr.x.size(); ++i)
      pts += (i ? " " : "") + fmt_num(px(sr.x[i])) + "," + fmt_num(py(sr.y[i]));
    s += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    for (std::size_t i = 0; i < sr.x.size(); ++i)
      s += "<circle cx=\"" + fmt_num(px(sr.x[i])) + "\" cy=\"" + fmt_num(py(sr.y[i])) + "\" r=\"3\" fill=\"" + col +
           "\"/>\n";
    const double ly = T + 10 + 18.0 * k;
    s += "<line x1=\"" + fmt_num(L + W + 10) + "\" y1=\"" + fmt_num(ly) + "\" x2=\"" + fmt_num(L + W + 30) +
         "\" y2=\"" + fmt_num(ly) + "\" stroke=\"" + col + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + fmt_num(L + W + 35) + "\" y=\"" + fmt_num(ly + 4) + "\">" + detail::xml_escape(sr.name) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

inline void emit_svg(const std::vector<Series>& series, const std::string& path, const ChartOptions& opt = {}) {
  atomic_write(path, render_svg(series, opt));
}

}  // namespace rbl
