#include "polemos/analysis/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace polemos::svg {
namespace {

constexpr double kWidth = 900, kHeight = 480;
constexpr double kLeft = 70, kRight = 180, kTop = 50, kBottom = 90;

constexpr std::array<const char*, 8> kPalette{"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                              "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Rounds the axis maximum up to 1, 2 or 5 times a power of ten.
double nice_ceiling(double v) {
  if (v <= 0) return 1;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (const double m : {1.0, 2.0, 5.0, 10.0})
    if (m * p >= v) return m * p;
  return 10 * p;
}

std::string tick_text(double v) {
  char buf[32];
  if (v == std::floor(v)) std::snprintf(buf, sizeof buf, "%.0f", v);
  else std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string header(const std::string& title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
                  "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" + escape_xml(title) +
       "</text>\n";
  return s;
}

std::string axes(double y_max, const std::string& y_label) {
  const double plot_h = kHeight - kTop - kBottom;
  std::string s;
  for (int i = 0; i <= 5; ++i) {
    const double v = y_max * i / 5;
    const double y = kHeight - kBottom - plot_h * i / 5;
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kWidth - kRight) + "\" y2=\"" + num(y) +
         "\" stroke=\"#dddddd\"/>\n";
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + tick_text(v) + "</text>\n";
  }
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
       num(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kHeight - kBottom) + "\" x2=\"" + num(kWidth - kRight) +
       "\" y2=\"" + num(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"18\" y=\"" + num(kTop + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
       num(kTop + plot_h / 2) + ")\">" + escape_xml(y_label) + "</text>\n";
  return s;
}

}  // namespace

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render(const BarChart& chart) {
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  double max_v = 0;
  for (const double v : chart.values) max_v = std::max(max_v, v);
  const double y_max = nice_ceiling(max_v);

  std::string s = header(chart.title) + axes(y_max, chart.y_label);
  const std::size_t n = chart.values.size();
  const double slot = n ? plot_w / static_cast<double>(n) : plot_w;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = plot_h * chart.values[i] / y_max;
    const double x = kLeft + slot * static_cast<double>(i) + slot * 0.15;
    const double y = kHeight - kBottom - h;
    s += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(slot * 0.7) + "\" height=\"" + num(h) +
         "\" fill=\"" + kPalette[i % kPalette.size()] + "\"/>\n";
    const std::string annotation = i < chart.value_text.size() ? chart.value_text[i] : tick_text(chart.values[i]);
    s += "<text x=\"" + num(x + slot * 0.35) + "\" y=\"" + num(y - 4) + "\" text-anchor=\"middle\">" +
         escape_xml(annotation) + "</text>\n";
    const double lx = x + slot * 0.35, ly = kHeight - kBottom + 14;
    const std::string label = i < chart.labels.size() ? chart.labels[i] : std::string{};
    s += "<text x=\"" + num(lx) + "\" y=\"" + num(ly) + "\" text-anchor=\"end\" transform=\"rotate(-30 " + num(lx) +
         " " + num(ly) + ")\">" + escape_xml(label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string render(const LineChart& chart) {
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  double max_v = 0;
  for (const LineSeries& ls : chart.series)
    for (const double v : ls.values) max_v = std::max(max_v, v);
  const double y_max = nice_ceiling(max_v);
  const std::size_t n = chart.x_labels.size();
  auto x_at = [&](std::size_t i) {
    return n <= 1 ? kLeft + plot_w / 2 : kLeft + plot_w * static_cast<double>(i) / static_cast<double>(n - 1);
  };

  std::string s = header(chart.title) + axes(y_max, chart.y_label);
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = x_at(i), ly = kHeight - kBottom + 14;
    s += "<text x=\"" + num(lx) + "\" y=\"" + num(ly) + "\" text-anchor=\"end\" transform=\"rotate(-30 " + num(lx) +
         " " + num(ly) + ")\">" + escape_xml(chart.x_labels[i]) + "</text>\n";
  }
  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const LineSeries& ls = chart.series[k];
    const char* color = kPalette[k % kPalette.size()];
    std::string points;
    for (std::size_t i = 0; i < ls.values.size() && i < n; ++i) {
      if (!points.empty()) points += ' ';
      points += num(x_at(i)) + "," + num(kHeight - kBottom - plot_h * ls.values[i] / y_max);
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" + points +
         "\"/>\n";
    for (std::size_t i = 0; i < ls.values.size() && i < n; ++i)
      s += "<circle cx=\"" + num(x_at(i)) + "\" cy=\"" + num(kHeight - kBottom - plot_h * ls.values[i] / y_max) +
           "\" r=\"3\" fill=\"" + color + "\"/>\n";
    const double ly = kTop + 18.0 * static_cast<double>(k);
    s += "<rect x=\"" + num(kWidth - kRight + 14) + "\" y=\"" + num(ly) + "\" width=\"12\" height=\"12\" fill=\"" +
         color + "\"/>\n";
    s += "<text x=\"" + num(kWidth - kRight + 32) + "\" y=\"" + num(ly + 10) + "\">" + escape_xml(ls.name) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace polemos::svg
