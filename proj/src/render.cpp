#include "warpqi/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>

namespace warpqi {

namespace {

constexpr int kColorbarStrip = 16;   // gradient strip width, px
constexpr int kColorbarGap = 10;     // gap between plot and strip
constexpr int kColorbarLabels = 30;  // room for tick labels
constexpr int kColorbarBands = 64;

std::uint8_t lerp_channel(std::uint8_t a, std::uint8_t b, double t) {
  return static_cast<std::uint8_t>(a + (static_cast<double>(b) - a) * t + 0.5);
}

void append(std::string& out, const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  out += buf;
}

std::string hex_color(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

}  // namespace

Rgb DivergingColormap::operator()(double q) const {
  q = std::clamp(q, -1.0, 1.0);
  const Rgb& ref = q < 0.0 ? negative : positive;
  const double t = std::abs(q);
  return {lerp_channel(midpoint.r, ref.r, t), lerp_channel(midpoint.g, ref.g, t),
          lerp_channel(midpoint.b, ref.b, t)};
}

std::string render_quality_svg(const Layout& layout,
                               const Triangulation& triangulation,
                               const QualityMap& quality,
                               const RenderSpec& spec) {
  const auto& tris = triangulation.triangles;
  if (tris.empty()) {
    raise(errc::empty_triangulation, "nothing to render");
  }
  if (quality.q_values.size() != tris.size()) {
    raise(errc::size_mismatch,
          "quality map has " + std::to_string(quality.q_values.size()) +
              " entries for " + std::to_string(tris.size()) + " triangles");
  }
  if (spec.width <= 0 || spec.height <= 0 || spec.margin < 0) {
    raise(errc::invalid_argument, "render spec dimensions must be positive");
  }

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Point2& p : layout.coords) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }

  const int cb_reserved =
      spec.colorbar ? kColorbarStrip + kColorbarGap + kColorbarLabels : 0;
  const double plot_w =
      std::max(1.0, static_cast<double>(spec.width - 2 * spec.margin - cb_reserved));
  const double plot_h = std::max(1.0, static_cast<double>(spec.height - 2 * spec.margin));
  const double dx = xmax - xmin;
  const double dy = ymax - ymin;
  double scale;
  if (dx <= 0.0 && dy <= 0.0) {
    scale = 1.0;
  } else {
    scale = std::min(dx > 0.0 ? plot_w / dx : std::numeric_limits<double>::infinity(),
                     dy > 0.0 ? plot_h / dy : std::numeric_limits<double>::infinity());
  }
  const double x_off = spec.margin + 0.5 * (plot_w - dx * scale);
  const double y_off = spec.margin + 0.5 * (plot_h - dy * scale);
  const auto to_px = [&](Point2 p) -> Point2 {
    return {x_off + (p.x - xmin) * scale,
            y_off + (ymax - p.y) * scale};  // flip y: data up renders up
  };

  std::string svg;
  svg.reserve(tris.size() * 96 + 4096);
  append(svg, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
  append(svg,
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
         "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
         spec.width, spec.height, spec.width, spec.height);

  append(svg, "<g stroke=\"%s\" stroke-width=\"0.3\" stroke-linejoin=\"round\">\n",
         spec.draw_edges ? "#3c3c3c" : "none");
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const Point2 a = to_px(layout.coords[tris[t].a]);
    const Point2 b = to_px(layout.coords[tris[t].b]);
    const Point2 c = to_px(layout.coords[tris[t].c]);
    append(svg,
           "<polygon points=\"%.2f,%.2f %.2f,%.2f %.2f,%.2f\" fill=\"%s\"/>\n",
           a.x, a.y, b.x, b.y, c.x, c.y,
           hex_color(spec.colormap(quality.q_values[t])).c_str());
  }
  append(svg, "</g>\n");

  if (spec.draw_points) {
    append(svg, "<g fill=\"#111111\">\n");
    for (const Point2& p : layout.coords) {
      const Point2 px = to_px(p);
      append(svg, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\"/>\n", px.x, px.y,
             spec.point_radius);
    }
    append(svg, "</g>\n");
  }

  if (spec.colorbar) {
    const double bar_x = spec.width - spec.margin - kColorbarLabels - kColorbarStrip;
    const double bar_top = spec.margin;
    const double bar_h = spec.height - 2.0 * spec.margin;
    append(svg, "<g>\n");
    for (int band = 0; band < kColorbarBands; ++band) {
      // q = +1 at the top of the bar down to -1 at the bottom
      const double q = 1.0 - 2.0 * (band + 0.5) / kColorbarBands;
      const double y0 = bar_top + bar_h * band / kColorbarBands;
      const double y1 = bar_top + bar_h * (band + 1) / kColorbarBands;
      append(svg,
             "<rect x=\"%.2f\" y=\"%.2f\" width=\"%d\" height=\"%.2f\" "
             "fill=\"%s\"/>\n",
             bar_x, y0, kColorbarStrip, y1 - y0 + 0.5,
             hex_color(spec.colormap(q)).c_str());
    }
    append(svg,
           "<rect x=\"%.2f\" y=\"%.2f\" width=\"%d\" height=\"%.2f\" "
           "fill=\"none\" stroke=\"#000000\" stroke-width=\"0.8\"/>\n",
           bar_x, bar_top, kColorbarStrip, bar_h);
    const double label_x = bar_x + kColorbarStrip + 4.0;
    append(svg,
           "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#000000\">\n");
    append(svg, "<text x=\"%.2f\" y=\"%.2f\">+1</text>\n", label_x,
           bar_top + 10.0);
    append(svg, "<text x=\"%.2f\" y=\"%.2f\">0</text>\n", label_x,
           bar_top + 0.5 * bar_h + 4.0);
    append(svg, "<text x=\"%.2f\" y=\"%.2f\">-1</text>\n", label_x,
           bar_top + bar_h);
    append(svg, "</g>\n</g>\n");
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace warpqi
