#include "monoflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "monoflow/errors.hpp"

namespace monoflow {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<SvgSeries>& series, bool log_x,
                    bool log_y) {
  const double W = 840, H = 520, ml = 70, mr = 30, mt = 40, mb = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  auto usable = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return false;
    if (log_x && x <= 0) return false;
    if (log_y && y <= 0) return false;
    return true;
  };
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      double px = log_x ? std::log10(s.x[i]) : s.x[i];
      double py = log_y ? std::log10(s.y[i]) : s.y[i];
      xmin = std::min(xmin, px), xmax = std::max(xmax, px);
      ymin = std::min(ymin, py), ymax = std::max(ymax, py);
    }
  if (!(xmin <= xmax)) xmin = 0, xmax = 1;
  if (!(ymin <= ymax)) ymin = 0, ymax = 1;
  if (xmax - xmin < 1e-12) xmax = xmin + 1;
  if (ymax - ymin < 1e-12) ymax = ymin + 1;
  auto X = [&](double v) {
    double p = log_x ? std::log10(v) : v;
    return ml + (p - xmin) / (xmax - xmin) * (W - ml - mr);
  };
  auto Y = [&](double v) {
    double p = log_y ? std::log10(v) : v;
    return H - mb - (p - ymin) / (ymax - ymin) * (H - mt - mb);
  };

  std::ofstream f(path);
  if (!f) throw IoError("cannot open SVG output: " + path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
    << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"16\">"
    << title << "</text>\n";
  // axes
  f << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
    << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
    << H - mb << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double fx = xmin + (xmax - xmin) * i / 4.0;
    double fy = ymin + (ymax - ymin) * i / 4.0;
    double lx = log_x ? std::pow(10.0, fx) : fx;
    double ly = log_y ? std::pow(10.0, fy) : fy;
    double px = ml + (W - ml - mr) * i / 4.0;
    double py = H - mb - (H - mt - mb) * i / 4.0;
    f << "<text x=\"" << px << "\" y=\"" << H - mb + 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"11\">"
      << num(lx) << "</text>\n";
    f << "<text x=\"" << ml - 6 << "\" y=\"" << py + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << num(ly) << "</text>\n";
  }
  int ci = 0;
  for (const auto& s : series) {
    const char* color = kPalette[ci % 8];
    f << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      f << num(X(s.x[i])) << "," << num(Y(s.y[i])) << " ";
    }
    f << "\"/>\n";
    f << "<text x=\"" << W - mr - 8 << "\" y=\"" << mt + 16 + 16 * ci
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
         "fill=\""
      << color << "\">" << s.label << "</text>\n";
    ++ci;
  }
  f << "</svg>\n";
  if (!f.good()) throw IoError("failed while writing SVG: " + path);
}

}  // namespace monoflow
