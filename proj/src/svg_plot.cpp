#include "granular/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace granular {

namespace {

constexpr int kWidth = 640, kHeight = 400;
constexpr double kLeft = 60, kRight = 610, kTop = 30, kBottom = 360;
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

}  // namespace

void emit_plot(const std::vector<PlotSeries>& series, PlotScale scale, const std::string& path) {
  if (series.empty()) throw std::invalid_argument("emit_plot: empty series list");

  const bool logy = scale == PlotScale::semilog_y;
  double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
  double vmin = tmin, vmax = -tmin;
  for (const auto& s : series) {
    if (s.t.size() != s.v.size()) throw std::invalid_argument("emit_plot: ragged series");
    for (size_t k = 0; k < s.t.size(); ++k) {
      if (!std::isfinite(s.t[k]) || !std::isfinite(s.v[k])) continue;
      if (logy && s.v[k] <= 0.0) continue;
      tmin = std::min(tmin, s.t[k]);
      tmax = std::max(tmax, s.t[k]);
      const double y = logy ? std::log10(s.v[k]) : s.v[k];
      vmin = std::min(vmin, y);
      vmax = std::max(vmax, y);
    }
  }
  if (!(tmin <= tmax)) throw std::invalid_argument("emit_plot: no plottable samples");
  if (tmax == tmin) tmax = tmin + 1.0;
  if (vmax == vmin) {
    vmax += 0.5;
    vmin -= 0.5;
  }

  auto sx = [&](double t) { return kLeft + (t - tmin) / (tmax - tmin) * (kRight - kLeft); };
  auto sy = [&](double y) { return kBottom - (y - vmin) / (vmax - vmin) * (kBottom - kTop); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_plot: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
      << fmt("<line x1=\"%.1f\" y1=\"360.0\" x2=\"%.1f\" y2=\"360.0\" stroke=\"black\"/>\n",
             kLeft, kRight)
      << fmt("<line x1=\"%.1f\" y1=\"360.0\" x2=\"%.1f\" y2=\"30.0\" stroke=\"black\"/>\n",
             kLeft, kLeft);

  for (int k = 0; k <= 4; ++k) {
    const double t = tmin + k * (tmax - tmin) / 4.0;
    const double y = vmin + k * (vmax - vmin) / 4.0;
    out << fmt("<text x=\"%.1f\" y=\"378\" font-size=\"11\" text-anchor=\"middle\">", sx(t))
        << fmt("%.4g</text>\n", t);
    out << fmt("<text x=\"54\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\">", sy(y) + 4.0)
        << (logy ? fmt("1e%.3g</text>\n", y) : fmt("%.4g</text>\n", y));
  }

  for (size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* colour = kPalette[i % 8];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (size_t k = 0; k < s.t.size(); ++k) {
      if (!std::isfinite(s.t[k]) || !std::isfinite(s.v[k])) continue;
      if (logy && s.v[k] <= 0.0) continue;
      const double y = logy ? std::log10(s.v[k]) : s.v[k];
      out << (first ? "" : " ") << fmt("%.2f,%.2f", sx(s.t[k]), sy(y));
      first = false;
    }
    out << "\"/>\n";
    out << "<text x=\"" << (kLeft + 10) << "\" y=\"" << (kTop + 16 + 14 * i)
        << "\" font-size=\"12\" fill=\"" << colour << "\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace granular
