#pragma once

#include <string>
#include <vector>

namespace granular {

struct PlotSeries {
  std::string label;
  std::vector<double> t;
  std::vector<double> v;
};

enum class PlotScale { linear, semilog_y };

/// Self-contained static SVG line chart, one polyline per series, byte
/// deterministic for identical inputs. semilog_y drops nonpositive samples.
void emit_plot(const std::vector<PlotSeries>& series, PlotScale scale, const std::string& path);

}  // namespace granular
