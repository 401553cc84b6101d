#pragma once

#include <span>
#include <string>
#include <vector>

#include "warpqi/data.hpp"
#include "warpqi/geometry.hpp"

namespace warpqi {

// Per-triangle diagnostics, index-aligned with the source Triangulation.
// Areas are normalized per space by that space's largest triangle.
struct QualityMap {
  std::vector<double> q_values;       // in [-1, 1]
  std::vector<double> areas_2d_norm;  // in (0, 1]
  std::vector<double> areas_hd_norm;  // in (0, 1]
  std::vector<bool> degenerate_flags;
};

struct MetricsReport {
  double warping_index = 0.0;
  double stress = 0.0;
  double trustworthiness = 0.0;
  int k_neighbors = 0;
  int n_points = 0;
  int n_triangles = 0;
  int degenerate_triangle_count = 0;
};

struct MetricsOptions {
  int k = 5;
  bool strict_metric = false;
};

// Divides each entry by the maximum of the list. Raises all_areas_zero when
// no entry is positive.
std::vector<double> normalize_areas(std::span<const double> areas);

// Signed relative area difference (a2d - ahd) / max(a2d, ahd) in [-1, 1];
// negative = compression, positive = stretching. Pairs where one side is
// below 1e-12 map to +/-1, both below to 0; such pairs set *degenerate.
double triangle_quality(double a2d_norm, double ahd_norm,
                        bool* degenerate = nullptr);

struct WarpingResult {
  double warping_index = 0.0;
  QualityMap quality;
  Triangulation triangulation;
  std::size_t metric_violations = 0;  // triangle-inequality clamps
  int degenerate_triangle_count = 0;
};

// Area-weighted mean |Q| over the Delaunay triangulation of the layout.
WarpingResult warping_index(const Layout& layout, const DistanceProvider& dist,
                            bool strict_metric = false);

// Kruskal stress-1 after closed-form optimal uniform scaling of the layout
// distances, over all i < j pairs.
double normalized_stress(const DistanceProvider& dist_hd, const Layout& layout);

// Venna-Kaski trustworthiness with layout/HD k-NN sets; distance ties break
// by ascending point index. Requires 1 <= k < n/2.
double trustworthiness(const DistanceProvider& dist_hd, const Layout& layout,
                       int k);

MetricsReport evaluate(const DistanceProvider& dist_hd, const Layout& layout,
                       const MetricsOptions& options = {});

// Stable-field-name JSON document; optionally embeds the per-triangle
// quality map together with its triangle index triples.
std::string metrics_report_json(const MetricsReport& report,
                                const QualityMap* per_triangle = nullptr,
                                const Triangulation* triangulation = nullptr);

}  // namespace warpqi
