#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "warpqi/errors.hpp"

namespace warpqi {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Vertex indices into the shared point index space, stored sorted ascending
// so triangle identity does not depend on construction order.
struct Triangle {
  int a = -1;
  int b = -1;
  int c = -1;

  friend bool operator==(const Triangle&, const Triangle&) = default;
};

struct Triangulation {
  std::vector<Triangle> triangles;
  int n_points = 0;
  // Input indices whose coordinates duplicated an earlier point; they are
  // excluded from the triangulation. (dropped index, kept index) pairs.
  std::vector<std::pair<int, int>> coalesced;
};

// Sign of the lifted 3x3 in-circle determinant: +1 if d lies strictly inside
// the circumcircle of (a, b, c), -1 if strictly outside, 0 if cocircular
// within a relative epsilon of 1e-12. Assumes (a, b, c) counter-clockwise;
// a clockwise triple flips the sign.
int incircle(Point2 a, Point2 b, Point2 c, Point2 d);

// |shoelace| / 2; zero for collinear points.
double triangle_area_2d(Point2 p, Point2 q, Point2 r);

struct HeronStats {
  std::size_t inequality_violations = 0;
};

// Area from side lengths, evaluated with the numerically stable form
// (sides sorted, stable product under the square root) so needle triangles
// keep their precision. A violated triangle inequality clamps the radicand
// to zero and bumps the stats counter; in strict mode a violation beyond
// 1e-9 relative slack raises triangle_inequality_violated instead.
double triangle_area_from_sides(double a, double b, double c,
                                HeronStats* stats = nullptr,
                                bool strict = false);

// Delaunay triangulation via Bowyer-Watson incremental insertion with a
// super-triangle. Deterministic for a fixed input order: points are inserted
// in index order and cocircular ties keep the earlier-created diagonal.
// Exactly coincident points are coalesced onto their first occurrence and
// reported in Triangulation::coalesced.
Triangulation delaunay_triangulate(std::span<const Point2> layout);

// High-dimensional counterpart areas: per triangle, queries the three
// pairwise distances and applies triangle_area_from_sides. Output is
// index-aligned with triangulation.triangles.
std::vector<double> hd_triangle_areas(
    const Triangulation& triangulation,
    const std::function<double(int, int)>& dist, HeronStats* stats = nullptr,
    bool strict = false);

}  // namespace warpqi
