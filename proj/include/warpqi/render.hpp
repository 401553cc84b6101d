#pragma once

#include <cstdint>
#include <string>

#include "warpqi/data.hpp"
#include "warpqi/geometry.hpp"
#include "warpqi/metrics.hpp"

namespace warpqi {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

// Piecewise-linear diverging map over [-1, 1]: negative endpoint for
// compression, midpoint for a faithful triangle, positive for stretching.
struct DivergingColormap {
  Rgb negative{33, 102, 172};   // blue
  Rgb midpoint{255, 255, 255};  // white
  Rgb positive{178, 24, 43};    // red

  Rgb operator()(double q) const;
};

struct RenderSpec {
  int width = 960;
  int height = 720;
  int margin = 24;
  DivergingColormap colormap;
  double point_radius = 1.4;
  bool draw_edges = true;
  bool draw_points = true;
  bool colorbar = true;
};

// One polygon per triangle, filled with colormap(Q), in triangle-list order;
// optional point markers and a vertical color bar with ticks at -1, 0, +1.
// Layout coordinates map affinely into the viewport preserving aspect ratio,
// with the y axis flipped so data "up" renders up. Output is deterministic:
// identical inputs produce byte-identical SVG.
std::string render_quality_svg(const Layout& layout,
                               const Triangulation& triangulation,
                               const QualityMap& quality,
                               const RenderSpec& spec = {});

}  // namespace warpqi
