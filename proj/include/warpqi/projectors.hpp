#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "warpqi/data.hpp"

namespace warpqi {

struct PcaResult {
  Layout layout;
  std::vector<double> component_variances;  // eigenvalues, descending
  bool degenerate = false;                  // covariance rank < out_dims
};

// Covariance eigendecomposition of the centered data; projects onto the top
// out_dims components. Sign convention: each component's largest-magnitude
// loading is made positive. When the covariance rank is below out_dims the
// projection still comes back, with zero variance in the trailing
// dimensions and `degenerate` set.
PcaResult pca_project(const PointSet& ps, int out_dims = 2);

// Classic exact t-SNE schedule: early exaggeration for the first 250
// iterations, momentum 0.5 switching to 0.8 at 250, adaptive per-coordinate
// gains.
struct TsneConfig {
  double perplexity = 30.0;
  int iterations = 1000;
  double learning_rate = 70.0;
  double early_exaggeration = 12.0;
  int exaggeration_iters = 250;
  double momentum_initial = 0.5;
  double momentum_final = 0.8;
  int momentum_switch_iter = 250;
  std::uint64_t seed = 0;
  bool record_kl = false;  // track KL divergence per iteration (small runs)
};

struct TsneResult {
  Layout layout;
  std::vector<double> kl_history;  // per iteration when record_kl is set
  int calibration_clamped = 0;     // rows whose entropy search hit a bound
};

// Exact (all-pairs) t-SNE; deterministic per (input, config, seed). The
// initial layout is a small-variance Gaussian from the seeded stream.
TsneResult tsne_project(const PointSet& ps, const TsneConfig& cfg = {});
TsneResult tsne_project(const DistanceProvider& dist, const TsneConfig& cfg = {});

struct CalibrationInfo {
  double entropy_bits = 0.0;
  int iterations = 0;
  bool clamped = false;
};

// Binary search for the Gaussian precision beta so that the Shannon entropy
// of p_j ~ exp(-beta * d_j^2) matches log2(perplexity) within 1e-5 bits,
// in at most 200 bisection steps. Unreachable targets clamp to the search
// bound and set info->clamped.
double perplexity_calibrate(std::span<const double> dist_row, double perplexity,
                            CalibrationInfo* info = nullptr);

// Symmetrized, normalized affinity matrix P (sums to 1).
Eigen::MatrixXd tsne_affinities(const DistanceProvider& dist, double perplexity,
                                int* clamped_rows = nullptr);

// KL divergence between affinities P and the Student-t similarities of the
// layout, and its exact gradient with respect to the layout coordinates.
double tsne_kl_objective(const Eigen::MatrixXd& p, const Layout& y);
std::vector<Point2> tsne_kl_gradient(const Eigen::MatrixXd& p, const Layout& y);

}  // namespace warpqi
