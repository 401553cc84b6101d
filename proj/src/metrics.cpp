#include "warpqi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "parallel.hpp"

namespace warpqi {

namespace {

constexpr double kDegenerateEps = 1e-12;
constexpr std::size_t kRowBlock = 64;

double layout_distance(const Layout& l, int i, int j) {
  const double dx = l.coords[i].x - l.coords[j].x;
  const double dy = l.coords[i].y - l.coords[j].y;
  return std::sqrt(dx * dx + dy * dy);
}

void check_paired(const DistanceProvider& dist, const Layout& layout) {
  if (dist.size() != layout.n()) {
    raise(errc::size_mismatch,
          "distance provider has " + std::to_string(dist.size()) +
              " points but layout has " + std::to_string(layout.n()));
  }
}

}  // namespace

std::vector<double> normalize_areas(std::span<const double> areas) {
  double max_area = 0.0;
  for (double a : areas) max_area = std::max(max_area, a);
  if (!(max_area > 0.0)) {
    raise(errc::all_areas_zero, "no triangle has positive area");
  }
  std::vector<double> out(areas.size());
  for (std::size_t i = 0; i < areas.size(); ++i) out[i] = areas[i] / max_area;
  return out;
}

double triangle_quality(double a2d_norm, double ahd_norm, bool* degenerate) {
  const bool a_zero = a2d_norm < kDegenerateEps;
  const bool h_zero = ahd_norm < kDegenerateEps;
  if (degenerate) *degenerate = a_zero || h_zero;
  if (a_zero && h_zero) return 0.0;
  if (h_zero) return 1.0;
  if (a_zero) return -1.0;
  return (a2d_norm - ahd_norm) / std::max(a2d_norm, ahd_norm);
}

WarpingResult warping_index(const Layout& layout, const DistanceProvider& dist,
                            bool strict_metric) {
  check_paired(dist, layout);
  WarpingResult result;
  result.triangulation = delaunay_triangulate(layout.coords);
  const auto& tris = result.triangulation.triangles;

  std::vector<double> areas_2d;
  areas_2d.reserve(tris.size());
  for (const Triangle& t : tris) {
    areas_2d.push_back(triangle_area_2d(layout.coords[t.a], layout.coords[t.b],
                                        layout.coords[t.c]));
  }
  HeronStats heron;
  const std::vector<double> areas_hd = hd_triangle_areas(
      result.triangulation, [&](int i, int j) { return dist(i, j); }, &heron,
      strict_metric);
  result.metric_violations = heron.inequality_violations;

  result.quality.areas_2d_norm = normalize_areas(areas_2d);
  result.quality.areas_hd_norm = normalize_areas(areas_hd);

  const std::size_t m = tris.size();
  result.quality.q_values.resize(m);
  result.quality.degenerate_flags.assign(m, false);
  double weight_sum = 0.0;
  double weighted_abs_q = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    bool degenerate = false;
    const double q = triangle_quality(result.quality.areas_2d_norm[i],
                                      result.quality.areas_hd_norm[i],
                                      &degenerate);
    result.quality.q_values[i] = q;
    result.quality.degenerate_flags[i] = degenerate;
    if (degenerate) ++result.degenerate_triangle_count;
    weight_sum += result.quality.areas_2d_norm[i];
    weighted_abs_q += result.quality.areas_2d_norm[i] * std::abs(q);
  }
  result.warping_index = weighted_abs_q / weight_sum;
  return result;
}

double normalized_stress(const DistanceProvider& dist_hd,
                         const Layout& layout) {
  check_paired(dist_hd, layout);
  const int n = layout.n();
  if (n < 2) raise(errc::too_few_points, "stress needs at least 2 points");

  const std::size_t nblocks = (static_cast<std::size_t>(n) + kRowBlock - 1) / kRowBlock;
  std::vector<double> part_dot(nblocks, 0.0), part_dhat2(nblocks, 0.0),
      part_d2(nblocks, 0.0);
  detail::parallel_blocks(
      n, kRowBlock, [&](std::size_t b, std::size_t begin, std::size_t end) {
        double dot = 0.0, dhat2 = 0.0, d2 = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          for (int j = static_cast<int>(i) + 1; j < n; ++j) {
            const double d = dist_hd(static_cast<int>(i), j);
            const double dh = layout_distance(layout, static_cast<int>(i), j);
            dot += d * dh;
            dhat2 += dh * dh;
            d2 += d * d;
          }
        }
        part_dot[b] = dot;
        part_dhat2[b] = dhat2;
        part_d2[b] = d2;
      });
  const double dot = std::accumulate(part_dot.begin(), part_dot.end(), 0.0);
  const double dhat2 =
      std::accumulate(part_dhat2.begin(), part_dhat2.end(), 0.0);
  const double d2 = std::accumulate(part_d2.begin(), part_d2.end(), 0.0);
  if (!(d2 > 0.0)) raise(errc::all_distances_zero, "all distances are zero");
  if (!(dhat2 > 0.0)) {
    raise(errc::all_distances_zero, "all layout distances are zero");
  }
  const double alpha = dot / dhat2;

  std::vector<double> part_res(nblocks, 0.0);
  detail::parallel_blocks(
      n, kRowBlock, [&](std::size_t b, std::size_t begin, std::size_t end) {
        double res = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          for (int j = static_cast<int>(i) + 1; j < n; ++j) {
            const double d = dist_hd(static_cast<int>(i), j);
            const double dh = layout_distance(layout, static_cast<int>(i), j);
            const double e = d - alpha * dh;
            res += e * e;
          }
        }
        part_res[b] = res;
      });
  const double res = std::accumulate(part_res.begin(), part_res.end(), 0.0);
  return std::sqrt(res / d2);
}

double trustworthiness(const DistanceProvider& dist_hd, const Layout& layout,
                       int k) {
  check_paired(dist_hd, layout);
  const int n = layout.n();
  if (k < 1 || 2 * k >= n) {
    raise(errc::k_too_large, "k = " + std::to_string(k) +
                                 " must satisfy 1 <= k < n/2 (n = " +
                                 std::to_string(n) + ")");
  }

  const std::size_t nblocks = (static_cast<std::size_t>(n) + kRowBlock - 1) / kRowBlock;
  std::vector<long long> part_penalty(nblocks, 0);
  detail::parallel_blocks(n, kRowBlock, [&](std::size_t b, std::size_t begin,
                                            std::size_t end) {
    std::vector<double> d_hd(n), d_2d(n);
    std::vector<int> order, nn2d, rank_hd(n);
    order.reserve(n);
    nn2d.reserve(n);
    long long penalty = 0;
    for (std::size_t iu = begin; iu < end; ++iu) {
      const int i = static_cast<int>(iu);
      for (int j = 0; j < n; ++j) {
        d_hd[j] = dist_hd(i, j);
        d_2d[j] = layout_distance(layout, i, j);
      }
      // HD ranks over j != i; ties break by ascending index.
      order.clear();
      for (int j = 0; j < n; ++j) {
        if (j != i) order.push_back(j);
      }
      std::sort(order.begin(), order.end(), [&](int a, int c) {
        if (d_hd[a] != d_hd[c]) return d_hd[a] < d_hd[c];
        return a < c;
      });
      for (int r = 0; r < n - 1; ++r) rank_hd[order[r]] = r + 1;

      // Layout k-NN; the HD k-NN set is the first k of `order`.
      nn2d = order;
      std::partial_sort(nn2d.begin(), nn2d.begin() + k, nn2d.end(),
                        [&](int a, int c) {
                          if (d_2d[a] != d_2d[c]) return d_2d[a] < d_2d[c];
                          return a < c;
                        });
      for (int r = 0; r < k; ++r) {
        const int j = nn2d[r];
        if (rank_hd[j] > k) penalty += rank_hd[j] - k;
      }
    }
    part_penalty[b] = penalty;
  });
  long long penalty = 0;
  for (long long p : part_penalty) penalty += p;

  const double norm = static_cast<double>(n) * k * (2.0 * n - 3.0 * k - 1.0);
  return 1.0 - 2.0 * static_cast<double>(penalty) / norm;
}

MetricsReport evaluate(const DistanceProvider& dist_hd, const Layout& layout,
                       const MetricsOptions& options) {
  check_paired(dist_hd, layout);
  const WarpingResult wr = warping_index(layout, dist_hd, options.strict_metric);
  MetricsReport report;
  report.warping_index = wr.warping_index;
  report.stress = normalized_stress(dist_hd, layout);
  report.trustworthiness = trustworthiness(dist_hd, layout, options.k);
  report.k_neighbors = options.k;
  report.n_points = layout.n();
  report.n_triangles = static_cast<int>(wr.triangulation.triangles.size());
  report.degenerate_triangle_count = wr.degenerate_triangle_count;
  return report;
}

std::string metrics_report_json(const MetricsReport& report,
                                const QualityMap* per_triangle,
                                const Triangulation* triangulation) {
  nlohmann::json doc{
      {"warping_index", report.warping_index},
      {"stress", report.stress},
      {"trustworthiness", report.trustworthiness},
      {"k_neighbors", report.k_neighbors},
      {"n_points", report.n_points},
      {"n_triangles", report.n_triangles},
      {"degenerate_triangle_count", report.degenerate_triangle_count},
  };
  if (per_triangle != nullptr) {
    nlohmann::json qm{
        {"q_values", per_triangle->q_values},
        {"areas_2d_norm", per_triangle->areas_2d_norm},
        {"areas_hd_norm", per_triangle->areas_hd_norm},
        {"degenerate_flags", per_triangle->degenerate_flags},
    };
    if (triangulation != nullptr) {
      nlohmann::json tris = nlohmann::json::array();
      for (const Triangle& t : triangulation->triangles) {
        tris.push_back({t.a, t.b, t.c});
      }
      qm["triangles"] = std::move(tris);
    }
    doc["quality_map"] = std::move(qm);
  }
  return doc.dump(2) + "\n";
}

}  // namespace warpqi
