#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "warpqi/errors.hpp"
#include "warpqi/geometry.hpp"

namespace warpqi {

// High-dimensional side: n points in d dimensions, row per point. Row order
// defines the index space shared with Layout.
struct PointSet {
  Eigen::MatrixXd points;  // n x d
  std::vector<std::string> ids;  // optional row labels

  int n() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

// 2D projection, index-aligned with its PointSet.
struct Layout {
  std::vector<Point2> coords;

  int n() const { return static_cast<int>(coords.size()); }
};

// Pairwise distances, backed either by a PointSet (Euclidean, computed on
// demand) or by an explicit validated matrix. Immutable after construction.
class DistanceProvider {
public:
  static DistanceProvider from_points(const PointSet& ps);
  static DistanceProvider from_layout(const Layout& layout);
  // Validates: square, symmetric (1e-9 relative), non-negative, zero diagonal.
  static DistanceProvider from_matrix(Eigen::MatrixXd dist);

  double operator()(int i, int j) const;
  int size() const { return n_; }
  bool matrix_backed() const { return use_matrix_; }

private:
  DistanceProvider() = default;
  Eigen::MatrixXd pts_;  // n x d when point-backed
  Eigen::MatrixXd mat_;  // n x n when matrix-backed
  int n_ = 0;
  bool use_matrix_ = false;
};

enum class Header { autodetect, yes, no };

// Comma-separated numeric matrix; '.' decimal separator; an optional single
// header row is detected by a non-numeric first row. Parse failures report
// 1-based data row and column.
PointSet load_points_csv(const std::string& path,
                         Header header = Header::autodetect);
void save_points_csv(const PointSet& ps, const std::string& path);

DistanceProvider load_distance_matrix(const std::string& path);

double euclidean_distance(const PointSet& ps, int i, int j);

// Synthetic plane-plus-noise dataset: first two coordinates uniform on
// [0,1), third uniform on [0,noise). Deterministic per seed; draws come from
// Rng in row order, x then y then z per point.
PointSet generate_square(int n, double noise, std::uint64_t seed);

// Layout CSV round-trips bitwise: values are written with 17 significant
// digits.
void save_layout_csv(const Layout& layout, const std::string& path);
Layout load_layout_csv(const std::string& path,
                       Header header = Header::autodetect);

}  // namespace warpqi
