#include "nhchain/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "nhchain/io.hpp"

namespace nhchain {

namespace {

constexpr double kWidth = 720.0, kHeight = 480.0;
constexpr double kMarginL = 70.0, kMarginR = 20.0, kMarginT = 40.0, kMarginB = 50.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_line(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& color, const std::string& label) {
  lines_.push_back(Line{x, y, {}, color, label, false});
}

void SvgPlot::add_points(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>& yerr, const std::string& color,
                         const std::string& label) {
  lines_.push_back(Line{x, y, yerr, color, label, true});
}

void SvgPlot::add_hline(double y, const std::string& color) { hlines_.push_back({y, color}); }
void SvgPlot::add_vline(double x, const std::string& color) { vlines_.push_back({x, color}); }

std::string SvgPlot::render() const {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  bool any = false;
  for (const auto& l : lines_)
    for (std::size_t i = 0; i < l.x.size() && i < l.y.size(); ++i) {
      if (!std::isfinite(l.x[i]) || !std::isfinite(l.y[i])) continue;
      const double e = (i < l.yerr.size()) ? l.yerr[i] : 0.0;
      xmin = std::min(xmin, l.x[i]);
      xmax = std::max(xmax, l.x[i]);
      ymin = std::min(ymin, l.y[i] - e);
      ymax = std::max(ymax, l.y[i] + e);
      any = true;
    }
  for (const auto& h : hlines_) {
    ymin = std::min(ymin, h.first);
    ymax = std::max(ymax, h.first);
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"monospace\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << title_ << "</text>\n";

  if (!any) {
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" fill=\"gray\">no data</text>\n</svg>\n";
    return svg.str();
  }
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double pw = kWidth - kMarginL - kMarginR, ph = kHeight - kMarginT - kMarginB;
  auto px = [&](double x) { return kMarginL + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kMarginT + (ymax - y) / (ymax - ymin) * ph; };

  // Axes box and tick labels.
  svg << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    svg << "<text x=\"" << px(xv) << "\" y=\"" << kHeight - kMarginB + 16
        << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    svg << "<text x=\"" << kMarginL - 6 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
  }
  svg << "<text x=\"" << kMarginL + pw / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << x_label_ << "</text>\n";
  svg << "<text x=\"16\" y=\"" << kMarginT + ph / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << kMarginT + ph / 2
      << ")\">" << y_label_ << "</text>\n";

  for (const auto& h : hlines_)
    svg << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(h.first) << "\" x2=\""
        << px(xmax) << "\" y2=\"" << py(h.first) << "\" stroke=\"" << h.second
        << "\" stroke-dasharray=\"4 3\"/>\n";
  for (const auto& v : vlines_)
    if (v.first >= xmin && v.first <= xmax)
      svg << "<line x1=\"" << px(v.first) << "\" y1=\"" << py(ymin) << "\" x2=\""
          << px(v.first) << "\" y2=\"" << py(ymax) << "\" stroke=\"" << v.second
          << "\" stroke-dasharray=\"4 3\"/>\n";

  int legend_row = 0;
  for (const auto& l : lines_) {
    if (l.points) {
      for (std::size_t i = 0; i < l.x.size(); ++i) {
        if (i < l.yerr.size() && l.yerr[i] > 0.0)
          svg << "<line x1=\"" << px(l.x[i]) << "\" y1=\"" << py(l.y[i] - l.yerr[i])
              << "\" x2=\"" << px(l.x[i]) << "\" y2=\"" << py(l.y[i] + l.yerr[i])
              << "\" stroke=\"" << l.color << "\"/>\n";
        svg << "<circle cx=\"" << px(l.x[i]) << "\" cy=\"" << py(l.y[i])
            << "\" r=\"2.5\" fill=\"" << l.color << "\"/>\n";
      }
    } else if (l.x.size() >= 2) {
      svg << "<polyline fill=\"none\" stroke=\"" << l.color << "\" points=\"";
      for (std::size_t i = 0; i < l.x.size(); ++i)
        svg << px(l.x[i]) << "," << py(l.y[i]) << " ";
      svg << "\"/>\n";
    }
    if (!l.label.empty()) {
      const double ly = kMarginT + 14 + 16 * legend_row++;
      svg << "<line x1=\"" << kMarginL + pw - 110 << "\" y1=\"" << ly - 4
          << "\" x2=\"" << kMarginL + pw - 90 << "\" y2=\"" << ly - 4
          << "\" stroke=\"" << l.color << "\"/>\n";
      svg << "<text x=\"" << kMarginL + pw - 84 << "\" y=\"" << ly << "\">" << l.label
          << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

void SvgPlot::write(const std::filesystem::path& path) const {
  write_text_file(path, render());
}

}  // namespace nhchain
