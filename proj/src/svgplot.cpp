#include "medsensor/svgplot.hpp"

#include <algorithm>
#include <cstdio>

#include "medsensor/errors.hpp"
#include "medsensor/ingest.hpp"

namespace medsensor {

namespace {

const char* kAxisColors[3] = {"#d62728", "#2ca02c", "#1f77b4"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const std::vector<PlotTrace>& traces, int width, int height) {
  if (traces.empty()) throw EmptyInput("render_svg: no traces");

  std::int64_t t_max = 1;
  float v_min = 0.0f, v_max = 1.0f;
  bool first = true;
  for (const auto& tr : traces) {
    for (const auto& s : tr.samples) {
      t_max = std::max(t_max, s.t_ms);
      const float lo = std::min({s.x, s.y, s.z});
      const float hi = std::max({s.x, s.y, s.z});
      if (first) {
        v_min = lo;
        v_max = hi;
        first = false;
      } else {
        v_min = std::min(v_min, lo);
        v_max = std::max(v_max, hi);
      }
    }
  }
  if (v_max <= v_min) v_max = v_min + 1.0f;

  const double margin = 30.0;
  const double pw = width - 2 * margin, ph = height - 2 * margin;
  auto sx = [&](std::int64_t t) {
    return margin + pw * static_cast<double>(t) / static_cast<double>(t_max);
  };
  auto sy = [&](float v) {
    return margin + ph * (1.0 - (v - v_min) / (v_max - v_min));
  };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(width) + "\" height=\"" + std::to_string(height) +
                    "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const auto& tr : traces) {
    for (int axis = 0; axis < 3; ++axis) {
      out += "<polyline fill=\"none\" stroke=\"";
      out += kAxisColors[axis];
      out += "\" stroke-width=\"1\" points=\"";
      for (const auto& s : tr.samples) {
        const float v = axis == 0 ? s.x : axis == 1 ? s.y : s.z;
        out += num(sx(s.t_ms)) + ',' + num(sy(v)) + ' ';
      }
      out += "\"/>\n";
    }
    if (tr.boundaries && !tr.samples.empty()) {
      for (std::size_t idx : {tr.boundaries->start_idx, tr.boundaries->end_idx}) {
        const std::size_t i = std::min(idx, tr.samples.size() - 1);
        const double x = sx(tr.samples[i].t_ms);
        out += "<line x1=\"" + num(x) + "\" y1=\"" + num(margin) + "\" x2=\"" + num(x) +
               "\" y2=\"" + num(margin + ph) +
               "\" stroke=\"#555555\" stroke-dasharray=\"4 3\"/>\n";
      }
    }
  }
  out += "</svg>\n";
  return out;
}

std::string render_plot_csv(const std::vector<AccelSample>& samples) {
  return serialize_sensor_csv(samples);
}

}  // namespace medsensor
