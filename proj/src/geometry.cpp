#include "warpqi/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <unordered_map>

namespace warpqi {

namespace {

constexpr double kRelEps = 1e-12;      // predicate tolerance, relative
constexpr double kMetricSlack = 1e-9;  // strict-mode triangle-inequality slack

int sign_with_tol(double value, double magnitude) {
  const double tol = kRelEps * magnitude;
  if (value > tol) return 1;
  if (value < -tol) return -1;
  return 0;
}

int orient2d(Point2 a, Point2 b, Point2 c) {
  const double t1 = (b.x - a.x) * (c.y - a.y);
  const double t2 = (c.x - a.x) * (b.y - a.y);
  return sign_with_tol(t1 - t2, std::abs(t1) + std::abs(t2));
}

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

std::uint64_t coord_key(double v) {
  if (v == 0.0) v = 0.0;  // merge -0.0 with +0.0
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  return bits;
}

struct PointKeyHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
    std::uint64_t h = k.first * 0x9e3779b97f4a7c15ull;
    h ^= k.second + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// Incremental Bowyer-Watson over the input points plus three far-away
// super-triangle vertices. Predicates are plain double determinants with a
// relative epsilon; cocircular ties are excluded from insertion cavities,
// which keeps the diagonal created earlier and makes the result a
// deterministic function of the insertion (index) order.
class BowyerWatson {
public:
  BowyerWatson(std::span<const Point2> pts, const std::vector<int>& kept)
      : n_real_(static_cast<int>(pts.size())) {
    pts_.assign(pts.begin(), pts.end());

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (int i : kept) {
      xmin = std::min(xmin, pts_[i].x);
      xmax = std::max(xmax, pts_[i].x);
      ymin = std::min(ymin, pts_[i].y);
      ymax = std::max(ymax, pts_[i].y);
    }
    const double cx = 0.5 * (xmin + xmax);
    const double cy = 0.5 * (ymin + ymax);
    double span = std::max(xmax - xmin, ymax - ymin);
    span = std::max(span, 1e-300);
    const double m = std::min(1e8 * span, 1e300);

    pts_.push_back({cx - m, cy - 0.7 * m});
    pts_.push_back({cx + m, cy - 0.7 * m});
    pts_.push_back({cx, cy + m});
    tris_.push_back({{n_real_, n_real_ + 1, n_real_ + 2}, {-1, -1, -1}, true});
    last_ = 0;
    in_cavity_.assign(1, 0);
  }

  void insert(int vi) {
    const Point2 p = pts_[vi];
    int seed = locate(p);
    if (seed < 0 || !strictly_bad(seed, p)) seed = scan_for_bad(p);
    bool tie_cavity = false;
    if (seed < 0) {
      // No circumcircle strictly contains p: the point is cocircular or
      // coincident with its whole neighborhood at predicate tolerance.
      // Fall back to the containing triangle alone.
      seed = scan_for_containing(p);
      tie_cavity = true;
    }

    ++epoch_;
    cavity_.clear();
    boundary_.clear();
    cavity_.push_back(seed);
    mark(in_cavity_, seed);
    for (std::size_t q = 0; q < cavity_.size(); ++q) {
      const int t = cavity_[q];
      for (int e = 0; e < 3; ++e) {
        const int o = tris_[t].nbr[e];
        if (o >= 0 && marked(in_cavity_, o)) continue;
        const bool o_bad =
            o >= 0 && !tie_cavity && strictly_bad(o, p);
        if (o_bad) {
          if (!marked(in_cavity_, o)) {
            cavity_.push_back(o);
            mark(in_cavity_, o);
          }
        } else {
          boundary_.push_back({tris_[t].v[e], tris_[t].v[(e + 1) % 3], o});
        }
      }
    }

    for (int t : cavity_) tris_[t].alive = false;

    // Fan the new point to every boundary edge. Boundary edges wind
    // counter-clockwise around the cavity, so (va, vb, vi) stays CCW.
    // Inner adjacency is stitched via a directed-edge map, which also
    // copes with pinched boundaries (a vertex appearing twice).
    edge_owner_.clear();
    const int first_new = static_cast<int>(tris_.size());
    for (const auto& be : boundary_) {
      const int t = static_cast<int>(tris_.size());
      tris_.push_back({{be.va, be.vb, vi}, {be.outer, -1, -1}, true});
      grow_marks();
      if (be.outer >= 0) set_neighbor(be.outer, be.vb, be.va, t);
      edge_owner_[edge_key(be.vb, vi)] = t;  // edge 1
      edge_owner_[edge_key(vi, be.va)] = t;  // edge 2
    }
    for (int t = first_new; t < static_cast<int>(tris_.size()); ++t) {
      const auto e1 = edge_owner_.find(edge_key(vi, tris_[t].v[1]));
      const auto e2 = edge_owner_.find(edge_key(tris_[t].v[0], vi));
      tris_[t].nbr[1] = e1 == edge_owner_.end() ? -1 : e1->second;
      tris_[t].nbr[2] = e2 == edge_owner_.end() ? -1 : e2->second;
    }
    last_ = first_new;
  }

  Triangulation finish(int n_input,
                       std::vector<std::pair<int, int>> coalesced) const {
    Triangulation out;
    out.n_points = n_input;
    out.coalesced = std::move(coalesced);
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= n_real_ || t.v[1] >= n_real_ || t.v[2] >= n_real_) continue;
      std::array<int, 3> v{t.v[0], t.v[1], t.v[2]};
      std::sort(v.begin(), v.end());
      out.triangles.push_back({v[0], v[1], v[2]});
    }
    std::sort(out.triangles.begin(), out.triangles.end(),
              [](const Triangle& l, const Triangle& r) {
                return std::tie(l.a, l.b, l.c) < std::tie(r.a, r.b, r.c);
              });
    return out;
  }

private:
  struct Tri {
    std::array<int, 3> v;    // CCW
    std::array<int, 3> nbr;  // neighbor across edge (v[i], v[i+1])
    bool alive = true;
  };
  struct BoundaryEdge {
    int va, vb, outer;
  };

  bool strictly_bad(int t, Point2 p) const {
    const Tri& tr = tris_[t];
    return incircle(pts_[tr.v[0]], pts_[tr.v[1]], pts_[tr.v[2]], p) > 0;
  }

  bool contains(int t, Point2 p) const {
    const Tri& tr = tris_[t];
    for (int e = 0; e < 3; ++e) {
      if (orient2d(pts_[tr.v[e]], pts_[tr.v[(e + 1) % 3]], p) < 0) return false;
    }
    return true;
  }

  // Deterministic visibility walk from the most recent triangle.
  int locate(Point2 p) const {
    int cur = last_;
    const std::size_t limit = 4 * tris_.size() + 64;
    for (std::size_t step = 0; step < limit; ++step) {
      if (!tris_[cur].alive) return -1;
      bool outside = false;
      int next = -1;
      for (int e = 0; e < 3; ++e) {
        const Tri& t = tris_[cur];
        if (orient2d(pts_[t.v[e]], pts_[t.v[(e + 1) % 3]], p) < 0) {
          outside = true;
          next = t.nbr[e];
          break;
        }
      }
      if (!outside) return cur;
      if (next < 0) return -1;  // walked off the mesh; use the fallback scan
      cur = next;
    }
    return -1;
  }

  int scan_for_bad(Point2 p) const {
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (tris_[t].alive && strictly_bad(t, p)) return t;
    }
    return -1;
  }

  int scan_for_containing(Point2 p) const {
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (tris_[t].alive && contains(t, p)) return t;
    }
    raise(errc::non_finite, "point location failed; input is degenerate");
  }

  void set_neighbor(int t, int va, int vb, int to) {
    Tri& tr = tris_[t];
    for (int e = 0; e < 3; ++e) {
      if (tr.v[e] == va && tr.v[(e + 1) % 3] == vb) {
        tr.nbr[e] = to;
        return;
      }
    }
  }

  void grow_marks() { in_cavity_.push_back(0); }
  void mark(std::vector<std::uint32_t>& m, int t) const { m[t] = epoch_; }
  bool marked(const std::vector<std::uint32_t>& m, int t) const {
    return m[t] == epoch_;
  }
  static std::uint64_t edge_key(int u, int v) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
           static_cast<std::uint32_t>(v);
  }

  int n_real_;
  std::vector<Point2> pts_;
  std::vector<Tri> tris_;
  int last_ = 0;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> in_cavity_;
  std::vector<int> cavity_;
  std::vector<BoundaryEdge> boundary_;
  std::unordered_map<std::uint64_t, int> edge_owner_;
};

}  // namespace

int incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad2 = adx * adx + ady * ady;
  const double bd2 = bdx * bdx + bdy * bdy;
  const double cd2 = cdx * cdx + cdy * cdy;
  const double t1 = ad2 * (bdx * cdy - cdx * bdy);
  const double t2 = bd2 * (cdx * ady - adx * cdy);
  const double t3 = cd2 * (adx * bdy - bdx * ady);
  return sign_with_tol(t1 + t2 + t3,
                       std::abs(t1) + std::abs(t2) + std::abs(t3));
}

double triangle_area_2d(Point2 p, Point2 q, Point2 r) {
  const double cross =
      (q.x - p.x) * (r.y - p.y) - (r.x - p.x) * (q.y - p.y);
  return 0.5 * std::abs(cross);
}

double triangle_area_from_sides(double a, double b, double c,
                                HeronStats* stats, bool strict) {
  if (a < 0.0 || b < 0.0 || c < 0.0 || !std::isfinite(a + b + c)) {
    raise(errc::negative_side_length, "side lengths must be finite and >= 0");
  }
  // Sort descending: a >= b >= c.
  if (a < b) std::swap(a, b);
  if (a < c) std::swap(a, c);
  if (b < c) std::swap(b, c);
  const double t = c - (a - b);  // <= 0 when a > b + c
  if (t < 0.0) {
    if (strict && t < -kMetricSlack * a) {
      raise(errc::triangle_inequality_violated,
            "side lengths violate the triangle inequality (non-metric "
            "distances)");
    }
    if (stats) ++stats->inequality_violations;
    return 0.0;
  }
  const double rad = (a + (b + c)) * t * (c + (a - b)) * (a + (b - c));
  return 0.25 * std::sqrt(std::max(rad, 0.0));
}

Triangulation delaunay_triangulate(std::span<const Point2> layout) {
  const int n = static_cast<int>(layout.size());
  if (n < 3) raise(errc::fewer_than_three_points, "need at least 3 points");
  for (int i = 0; i < n; ++i) {
    if (!finite(layout[i])) {
      raise(errc::non_finite,
            "layout point " + std::to_string(i) + " is not finite");
    }
  }

  // Coalesce exactly coincident coordinates onto the first occurrence.
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, int, PointKeyHash>
      seen;
  seen.reserve(static_cast<std::size_t>(n) * 2);
  std::vector<int> kept;
  kept.reserve(n);
  std::vector<std::pair<int, int>> coalesced;
  for (int i = 0; i < n; ++i) {
    const auto key = std::make_pair(coord_key(layout[i].x), coord_key(layout[i].y));
    auto [it, inserted] = seen.emplace(key, i);
    if (inserted) {
      kept.push_back(i);
    } else {
      coalesced.emplace_back(i, it->second);
    }
  }

  if (static_cast<int>(kept.size()) < 3) {
    raise(errc::all_points_collinear,
          "fewer than 3 distinct points; no triangle exists");
  }
  bool any_turn = false;
  const Point2 p0 = layout[kept[0]];
  int base = -1;
  for (std::size_t i = 1; i < kept.size(); ++i) {
    if (layout[kept[i]].x != p0.x || layout[kept[i]].y != p0.y) {
      base = kept[i];
      break;
    }
  }
  for (int i : kept) {
    if (base >= 0 && orient2d(p0, layout[base], layout[i]) != 0) {
      any_turn = true;
      break;
    }
  }
  if (!any_turn) {
    raise(errc::all_points_collinear, "all points are collinear");
  }

  BowyerWatson bw(layout, kept);
  for (int i : kept) bw.insert(i);
  return bw.finish(n, std::move(coalesced));
}

std::vector<double> hd_triangle_areas(
    const Triangulation& triangulation,
    const std::function<double(int, int)>& dist, HeronStats* stats,
    bool strict) {
  std::vector<double> areas;
  areas.reserve(triangulation.triangles.size());
  for (const Triangle& t : triangulation.triangles) {
    const double ab = dist(t.a, t.b);
    const double ac = dist(t.a, t.c);
    const double bc = dist(t.b, t.c);
    areas.push_back(triangle_area_from_sides(ab, ac, bc, stats, strict));
  }
  return areas;
}

const char* errc_name(errc code) {
  switch (code) {
    case errc::fewer_than_three_points: return "FewerThanThreePoints";
    case errc::all_points_collinear: return "AllPointsCollinear";
    case errc::negative_side_length: return "NegativeSideLength";
    case errc::triangle_inequality_violated: return "TriangleInequalityViolated";
    case errc::all_areas_zero: return "AllAreasZero";
    case errc::all_distances_zero: return "AllDistancesZero";
    case errc::k_too_large: return "KTooLarge";
    case errc::parse_error: return "ParseError";
    case errc::ragged_rows: return "RaggedRows";
    case errc::non_finite: return "NonFinite";
    case errc::not_square: return "NotSquare";
    case errc::not_symmetric: return "NotSymmetric";
    case errc::negative_entry: return "NegativeEntry";
    case errc::non_zero_diagonal: return "NonZeroDiagonal";
    case errc::wrong_column_count: return "WrongColumnCount";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::perplexity_too_large: return "PerplexityTooLarge";
    case errc::too_few_points: return "TooFewPoints";
    case errc::empty_triangulation: return "EmptyTriangulation";
    case errc::size_mismatch: return "SizeMismatch";
    case errc::file_not_found: return "FileNotFound";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace warpqi
