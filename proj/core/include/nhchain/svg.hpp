#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nhchain {

/// Deterministic SVG line plots: fixed fonts and sizes, output depends only
/// on the data and labels handed in.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_line(const std::vector<double>& x, const std::vector<double>& y,
                const std::string& color, const std::string& label);
  void add_points(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& yerr, const std::string& color,
                  const std::string& label);
  void add_hline(double y, const std::string& color);
  void add_vline(double x, const std::string& color);

  std::string render() const;
  void write(const std::filesystem::path& path) const;

 private:
  struct Line {
    std::vector<double> x, y, yerr;
    std::string color, label;
    bool points = false;
  };
  std::string title_, x_label_, y_label_;
  std::vector<Line> lines_;
  std::vector<std::pair<double, std::string>> hlines_;
  std::vector<std::pair<double, std::string>> vlines_;
};

}  // namespace nhchain
