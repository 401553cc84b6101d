#include "warpqi/projectors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "parallel.hpp"
#include "warpqi/rng.hpp"

namespace warpqi {

namespace {

constexpr std::size_t kRowBlock = 32;
constexpr double kEntropyTolBits = 1e-5;
constexpr int kMaxBisection = 200;
constexpr double kLog2e = 1.4426950408889634;  // 1 / ln 2

// Entropy (bits) of p_j ~ exp(-beta * sq[j]), with exponents shifted by the
// row minimum so large beta stays finite.
double row_entropy_bits(std::span<const double> sq, double beta,
                        double sq_min) {
  double sum_w = 0.0;
  double sum_wd = 0.0;
  for (double d2 : sq) {
    const double w = std::exp(-beta * (d2 - sq_min));
    sum_w += w;
    sum_wd += w * (d2 - sq_min);
  }
  // H = log(sum_w) + beta * E[d2 - min], in nats; convert to bits.
  const double h_nats = std::log(sum_w) + beta * (sum_wd / sum_w);
  return h_nats * kLog2e;
}

double calibrate_sq(std::span<const double> sq, double perplexity,
                    CalibrationInfo* info) {
  const double target = std::log2(perplexity);
  double sq_min = std::numeric_limits<double>::infinity();
  for (double d2 : sq) sq_min = std::min(sq_min, d2);

  double beta = 1.0;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool found = false;
  int iter = 0;
  double h = 0.0;
  for (; iter < kMaxBisection; ++iter) {
    h = row_entropy_bits(sq, beta, sq_min);
    const double diff = h - target;
    if (std::abs(diff) < kEntropyTolBits) {
      found = true;
      break;
    }
    if (diff > 0.0) {  // too spread out: sharpen
      lo = beta;
      beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
    } else {
      hi = beta;
      beta = lo == 0.0 ? beta * 0.5 : 0.5 * (beta + lo);
    }
  }
  if (info) {
    info->entropy_bits = h;
    info->iterations = iter;
    info->clamped = !found;
  }
  return beta;
}

void validate_config(const TsneConfig& cfg) {
  if (cfg.perplexity <= 0.0 || cfg.iterations < 1 || cfg.learning_rate <= 0.0 ||
      cfg.early_exaggeration <= 0.0 || cfg.momentum_initial < 0.0 ||
      cfg.momentum_final < 0.0) {
    raise(errc::invalid_argument, "t-SNE configuration values must be positive");
  }
}

Eigen::MatrixXd squared_distances(const DistanceProvider& dist) {
  const int n = dist.size();
  Eigen::MatrixXd d2(n, n);
  for (int i = 0; i < n; ++i) {
    d2(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double d = dist(i, j);
      d2(i, j) = d * d;
      d2(j, i) = d2(i, j);
    }
  }
  return d2;
}

// Student-t weights w_ij = 1 / (1 + |y_i - y_j|^2) and their total sum Z,
// reduced in fixed block order for determinism. The matrix is symmetric and
// block b fills columns [begin, end): hot loops read w(j, i) so the inner
// index walks a contiguous column.
double student_weights(const Layout& y, Eigen::MatrixXd& w) {
  const int n = y.n();
  const std::size_t nblocks = (static_cast<std::size_t>(n) + kRowBlock - 1) / kRowBlock;
  std::vector<double> part(nblocks, 0.0);
  detail::parallel_blocks(
      n, kRowBlock, [&](std::size_t b, std::size_t begin, std::size_t end) {
        double local = 0.0;
        for (std::size_t iu = begin; iu < end; ++iu) {
          const int i = static_cast<int>(iu);
          w(i, i) = 0.0;
          for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dx = y.coords[i].x - y.coords[j].x;
            const double dy = y.coords[i].y - y.coords[j].y;
            const double v = 1.0 / (1.0 + dx * dx + dy * dy);
            w(j, i) = v;
            local += v;
          }
        }
        part[b] = local;
      });
  return std::accumulate(part.begin(), part.end(), 0.0);
}

TsneResult tsne_core(const Eigen::MatrixXd& d2, const TsneConfig& cfg) {
  validate_config(cfg);
  const int n = static_cast<int>(d2.rows());
  if (n < 10) raise(errc::too_few_points, "t-SNE needs at least 10 points");
  if (3.0 * cfg.perplexity > n - 1) {
    raise(errc::perplexity_too_large,
          "perplexity " + std::to_string(cfg.perplexity) +
              " too large for n = " + std::to_string(n) +
              " (needs perplexity < (n-1)/3)");
  }

  // Conditional affinities, perplexity-calibrated per point. Column i holds
  // the conditional distribution given point i (p(j, i) = p_{j|i}), so the
  // fill walks contiguous memory; symmetrization below makes p symmetric.
  Eigen::MatrixXd p(n, n);
  std::vector<int> clamped_rows(
      (static_cast<std::size_t>(n) + kRowBlock - 1) / kRowBlock, 0);
  detail::parallel_blocks(
      n, kRowBlock, [&](std::size_t b, std::size_t begin, std::size_t end) {
        std::vector<double> sq(n - 1);
        int clamped = 0;
        for (std::size_t iu = begin; iu < end; ++iu) {
          const int i = static_cast<int>(iu);
          int m = 0;
          for (int j = 0; j < n; ++j) {
            if (j != i) sq[m++] = d2(j, i);
          }
          CalibrationInfo info;
          const double beta = calibrate_sq(sq, cfg.perplexity, &info);
          if (info.clamped) ++clamped;
          double sq_min = std::numeric_limits<double>::infinity();
          for (double v : sq) sq_min = std::min(sq_min, v);
          double sum_w = 0.0;
          for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double w = std::exp(-beta * (d2(j, i) - sq_min));
            p(j, i) = w;
            sum_w += w;
          }
          p(i, i) = 0.0;
          for (int j = 0; j < n; ++j) {
            if (j != i) p(j, i) /= sum_w;
          }
        }
        clamped_rows[b] = clamped;
      });

  TsneResult result;
  result.calibration_clamped =
      std::accumulate(clamped_rows.begin(), clamped_rows.end(), 0);

  // Symmetrize and normalize to a joint distribution.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = (p(i, j) + p(j, i)) / (2.0 * n);
      p(i, j) = v;
      p(j, i) = v;
    }
    p(i, i) = 0.0;
  }

  Layout y;
  y.coords.resize(n);
  Rng rng(cfg.seed);
  for (int i = 0; i < n; ++i) {
    y.coords[i].x = 1e-4 * rng.normal();
    y.coords[i].y = 1e-4 * rng.normal();
  }

  Eigen::MatrixXd w(n, n);
  std::vector<Point2> grad(n), velocity(n, {0.0, 0.0});
  std::vector<Point2> gains(n, {1.0, 1.0});
  const auto update_gain = [](double& gain, double g, double v) {
    gain = (g > 0.0) != (v > 0.0) ? gain + 0.2 : gain * 0.8;
    gain = std::max(gain, 0.01);
  };

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const double mult =
        iter < cfg.exaggeration_iters ? cfg.early_exaggeration : 1.0;
    const double momentum = iter < cfg.momentum_switch_iter
                                ? cfg.momentum_initial
                                : cfg.momentum_final;

    const double z = student_weights(y, w);
    const double inv_z = 1.0 / z;
    detail::parallel_blocks(
        n, kRowBlock, [&](std::size_t, std::size_t begin, std::size_t end) {
          for (std::size_t iu = begin; iu < end; ++iu) {
            const int i = static_cast<int>(iu);
            double gx = 0.0, gy = 0.0;
            const double* wc = w.col(i).data();
            const double* pc = p.col(i).data();
            for (int j = 0; j < n; ++j) {
              if (j == i) continue;
              const double wij = wc[j];
              const double coeff = (mult * pc[j] - wij * inv_z) * wij;
              gx += coeff * (y.coords[i].x - y.coords[j].x);
              gy += coeff * (y.coords[i].y - y.coords[j].y);
            }
            // Classic update direction: the reference schedule folds the
            // gradient's factor 4 into the learning rate.
            grad[i] = {gx, gy};
          }
        });

    double mean_x = 0.0, mean_y = 0.0;
    for (int i = 0; i < n; ++i) {
      update_gain(gains[i].x, grad[i].x, velocity[i].x);
      update_gain(gains[i].y, grad[i].y, velocity[i].y);
      velocity[i].x =
          momentum * velocity[i].x - cfg.learning_rate * gains[i].x * grad[i].x;
      velocity[i].y =
          momentum * velocity[i].y - cfg.learning_rate * gains[i].y * grad[i].y;
      y.coords[i].x += velocity[i].x;
      y.coords[i].y += velocity[i].y;
      mean_x += y.coords[i].x;
      mean_y += y.coords[i].y;
    }
    mean_x /= n;
    mean_y /= n;
    for (int i = 0; i < n; ++i) {
      y.coords[i].x -= mean_x;
      y.coords[i].y -= mean_y;
    }

    if (cfg.record_kl) result.kl_history.push_back(tsne_kl_objective(p, y));
  }

  result.layout = std::move(y);
  return result;
}

}  // namespace

PcaResult pca_project(const PointSet& ps, int out_dims) {
  const int n = ps.n();
  const int d = ps.dim();
  if (n < 2) raise(errc::too_few_points, "PCA needs at least 2 points");
  if (out_dims < 1 || out_dims > d) {
    raise(errc::invalid_argument,
          "out_dims = " + std::to_string(out_dims) +
              " outside 1.." + std::to_string(d));
  }

  const Eigen::RowVectorXd mean = ps.points.colwise().mean();
  const Eigen::MatrixXd centered = ps.points.rowwise() - mean;
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) {
    raise(errc::non_finite, "eigendecomposition failed");
  }

  PcaResult result;
  Eigen::MatrixXd components(d, out_dims);
  const double lambda_max = std::max(es.eigenvalues()(d - 1), 0.0);
  for (int c = 0; c < out_dims; ++c) {
    Eigen::VectorXd v = es.eigenvectors().col(d - 1 - c);  // descending
    const double lambda = es.eigenvalues()(d - 1 - c);
    // Largest-magnitude loading made positive, first index on ties.
    int arg = 0;
    for (int r = 1; r < d; ++r) {
      if (std::abs(v(r)) > std::abs(v(arg))) arg = r;
    }
    if (v(arg) < 0.0) v = -v;
    components.col(c) = v;
    result.component_variances.push_back(std::max(lambda, 0.0));
    if (lambda <= 1e-12 * std::max(lambda_max, 1e-300)) result.degenerate = true;
  }

  const Eigen::MatrixXd projected = centered * components;
  result.layout.coords.resize(n);
  for (int i = 0; i < n; ++i) {
    result.layout.coords[i] = {projected(i, 0),
                               out_dims > 1 ? projected(i, 1) : 0.0};
  }
  return result;
}

double perplexity_calibrate(std::span<const double> dist_row, double perplexity,
                            CalibrationInfo* info) {
  if (dist_row.size() < 2) {
    raise(errc::too_few_points, "distance row needs at least 2 entries");
  }
  for (double d : dist_row) {
    if (!std::isfinite(d) || d < 0.0) {
      raise(errc::non_finite, "distance row entries must be finite and >= 0");
    }
  }
  if (perplexity <= 0.0) {
    raise(errc::invalid_argument, "perplexity must be positive");
  }
  std::vector<double> sq(dist_row.size());
  for (std::size_t i = 0; i < dist_row.size(); ++i) {
    sq[i] = dist_row[i] * dist_row[i];
  }
  return calibrate_sq(sq, perplexity, info);
}

Eigen::MatrixXd tsne_affinities(const DistanceProvider& dist, double perplexity,
                                int* clamped_rows) {
  const int n = dist.size();
  if (n < 3) raise(errc::too_few_points, "affinities need at least 3 points");
  const Eigen::MatrixXd d2 = squared_distances(dist);
  Eigen::MatrixXd p(n, n);
  int clamped = 0;
  std::vector<double> sq(n - 1);
  for (int i = 0; i < n; ++i) {
    int m = 0;
    for (int j = 0; j < n; ++j) {
      if (j != i) sq[m++] = d2(j, i);
    }
    CalibrationInfo info;
    const double beta = calibrate_sq(sq, perplexity, &info);
    if (info.clamped) ++clamped;
    double sq_min = std::numeric_limits<double>::infinity();
    for (double v : sq) sq_min = std::min(sq_min, v);
    double sum_w = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = std::exp(-beta * (d2(j, i) - sq_min));
      p(j, i) = w;
      sum_w += w;
    }
    p(i, i) = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) p(j, i) /= sum_w;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = (p(i, j) + p(j, i)) / (2.0 * n);
      p(i, j) = v;
      p(j, i) = v;
    }
  }
  if (clamped_rows) *clamped_rows = clamped;
  return p;
}

double tsne_kl_objective(const Eigen::MatrixXd& p, const Layout& y) {
  const int n = y.n();
  if (p.rows() != n || p.cols() != n) {
    raise(errc::size_mismatch, "affinity matrix does not match layout size");
  }
  Eigen::MatrixXd w(n, n);
  const double z = student_weights(y, w);
  double kl = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double pij = p(j, i);
      if (pij > 0.0) kl += pij * std::log(pij / (w(j, i) / z));
    }
  }
  return kl;
}

std::vector<Point2> tsne_kl_gradient(const Eigen::MatrixXd& p, const Layout& y) {
  const int n = y.n();
  if (p.rows() != n || p.cols() != n) {
    raise(errc::size_mismatch, "affinity matrix does not match layout size");
  }
  Eigen::MatrixXd w(n, n);
  const double z = student_weights(y, w);
  const double p_sum = p.sum();  // 1 for a normalized joint distribution
  std::vector<Point2> grad(n);
  for (int i = 0; i < n; ++i) {
    double gx = 0.0, gy = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double wij = w(j, i);
      const double coeff = (p(j, i) - p_sum * wij / z) * wij;
      gx += coeff * (y.coords[i].x - y.coords[j].x);
      gy += coeff * (y.coords[i].y - y.coords[j].y);
    }
    grad[i] = {4.0 * gx, 4.0 * gy};
  }
  return grad;
}

TsneResult tsne_project(const PointSet& ps, const TsneConfig& cfg) {
  return tsne_core(squared_distances(DistanceProvider::from_points(ps)), cfg);
}

TsneResult tsne_project(const DistanceProvider& dist, const TsneConfig& cfg) {
  return tsne_core(squared_distances(dist), cfg);
}

}  // namespace warpqi
