#pragma once

#include <string>
#include <vector>

namespace polemos::svg {

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> labels;
  std::vector<double> values;
  std::vector<std::string> value_text;  // optional per-bar annotation
};

struct LineSeries {
  std::string name;
  std::vector<double> values;
};

struct LineChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> x_labels;
  std::vector<LineSeries> series;
};

/// Self-contained SVG documents. Coordinates are printed with two decimals
/// so identical inputs give identical bytes.
std::string render(const BarChart& chart);
std::string render(const LineChart& chart);

std::string escape_xml(const std::string& s);

}  // namespace polemos::svg
