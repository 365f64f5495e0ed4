#pragma once

#include <optional>
#include <string>
#include <vector>

#include "medsensor/types.hpp"

namespace medsensor {

struct PlotTrace {
  std::vector<AccelSample> samples;
  std::optional<Span> boundaries;  // refined span, drawn as vertical markers
};

// Dependency-free SVG line plot: three polylines (x, y, z) per trace, with
// optional boundary markers. Traces are superimposed on a shared time axis.
std::string render_svg(const std::vector<PlotTrace>& traces, int width = 900,
                       int height = 420);

// Per-axis time-series CSV (`t_ms,x,y,z`) for external plotting.
std::string render_plot_csv(const std::vector<AccelSample>& samples);

}  // namespace medsensor
