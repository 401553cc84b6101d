#include "warpqi/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string_view>

#include "warpqi/rng.hpp"

namespace warpqi {

namespace {

constexpr double kSymmetryTol = 1e-9;  // relative

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool parse_field(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

// Shared CSV -> dense matrix reader; data row/col numbers are 1-based.
std::vector<std::vector<double>> load_numeric_csv(const std::string& path,
                                                  Header header) {
  if (!std::filesystem::exists(path)) {
    raise(errc::file_not_found, "no such file: " + path);
  }
  std::ifstream in(path);
  if (!in) raise(errc::file_not_found, "cannot open: " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first_content_row = true;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_line(line);

    if (first_content_row) {
      if (header == Header::yes) {
        first_content_row = false;
        continue;
      }
      if (header == Header::autodetect) {
        double probe;
        bool all_numeric = true;
        for (const auto& f : fields) {
          if (!parse_field(f, probe)) {
            all_numeric = false;
            break;
          }
        }
        first_content_row = false;
        if (!all_numeric) continue;  // header row, skip
      } else {
        first_content_row = false;
      }
    }

    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v;
      if (!parse_field(fields[c], v)) {
        raise(errc::parse_error, path + ": row " +
                                     std::to_string(rows.size() + 1) +
                                     " col " + std::to_string(c + 1) +
                                     ": not a number: '" +
                                     std::string(trim(fields[c])) + "'");
      }
      if (!std::isfinite(v)) {
        raise(errc::non_finite, path + ": row " +
                                    std::to_string(rows.size() + 1) + " col " +
                                    std::to_string(c + 1) +
                                    ": non-finite value");
      }
      row.push_back(v);
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      raise(errc::ragged_rows,
            path + ": row " + std::to_string(rows.size() + 1) + " has " +
                std::to_string(row.size()) + " columns, expected " +
                std::to_string(width));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
  Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[i][j];
    }
  }
  return m;
}

void write_row(std::FILE* f, const double* vals, int count) {
  char buf[64];
  for (int j = 0; j < count; ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", vals[j]);
    std::fputs(buf, f);
    std::fputc(j + 1 == count ? '\n' : ',', f);
  }
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_for_write(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) raise(errc::file_not_found, "cannot write: " + path);
  return f;
}

}  // namespace

DistanceProvider DistanceProvider::from_points(const PointSet& ps) {
  if (ps.n() < 1) raise(errc::too_few_points, "empty point set");
  DistanceProvider dp;
  dp.pts_ = ps.points;
  dp.n_ = ps.n();
  dp.use_matrix_ = false;
  return dp;
}

DistanceProvider DistanceProvider::from_layout(const Layout& layout) {
  PointSet ps;
  ps.points.resize(layout.n(), 2);
  for (int i = 0; i < layout.n(); ++i) {
    ps.points(i, 0) = layout.coords[i].x;
    ps.points(i, 1) = layout.coords[i].y;
  }
  return from_points(ps);
}

DistanceProvider DistanceProvider::from_matrix(Eigen::MatrixXd dist) {
  if (dist.rows() != dist.cols()) {
    raise(errc::not_square, std::to_string(dist.rows()) + " rows vs " +
                                std::to_string(dist.cols()) + " columns");
  }
  const int n = static_cast<int>(dist.rows());
  for (int i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) {
      raise(errc::non_zero_diagonal,
            "entry (" + std::to_string(i) + "," + std::to_string(i) + ") = " +
                std::to_string(dist(i, i)));
    }
    for (int j = 0; j < n; ++j) {
      const double v = dist(i, j);
      if (v < 0.0) {
        raise(errc::negative_entry, "entry (" + std::to_string(i) + "," +
                                        std::to_string(j) + ") is negative");
      }
      if (j > i) {
        const double w = dist(j, i);
        const double tol = kSymmetryTol * std::max(std::abs(v), std::abs(w));
        if (std::abs(v - w) > tol) {
          raise(errc::not_symmetric, "entries (" + std::to_string(i) + "," +
                                         std::to_string(j) + ") and (" +
                                         std::to_string(j) + "," +
                                         std::to_string(i) + ") differ");
        }
      }
    }
  }
  DistanceProvider dp;
  dp.mat_ = std::move(dist);
  dp.n_ = n;
  dp.use_matrix_ = true;
  return dp;
}

double DistanceProvider::operator()(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) {
    raise(errc::index_out_of_range,
          "pair (" + std::to_string(i) + "," + std::to_string(j) +
              ") outside 0.." + std::to_string(n_ - 1));
  }
  if (use_matrix_) return mat_(i, j);
  return (pts_.row(i) - pts_.row(j)).norm();
}

PointSet load_points_csv(const std::string& path, Header header) {
  const auto rows = load_numeric_csv(path, header);
  if (rows.size() < 3) {
    raise(errc::too_few_points,
          path + ": " + std::to_string(rows.size()) + " rows, need >= 3");
  }
  PointSet ps;
  ps.points = to_matrix(rows);
  return ps;
}

void save_points_csv(const PointSet& ps, const std::string& path) {
  auto f = open_for_write(path);
  std::vector<double> row(ps.dim());
  for (int i = 0; i < ps.n(); ++i) {
    for (int j = 0; j < ps.dim(); ++j) row[j] = ps.points(i, j);
    write_row(f.get(), row.data(), ps.dim());
  }
}

DistanceProvider load_distance_matrix(const std::string& path) {
  const auto rows = load_numeric_csv(path, Header::autodetect);
  if (rows.empty()) raise(errc::parse_error, path + ": empty file");
  return DistanceProvider::from_matrix(to_matrix(rows));
}

double euclidean_distance(const PointSet& ps, int i, int j) {
  if (i < 0 || j < 0 || i >= ps.n() || j >= ps.n()) {
    raise(errc::index_out_of_range,
          "pair (" + std::to_string(i) + "," + std::to_string(j) +
              ") outside 0.." + std::to_string(ps.n() - 1));
  }
  return (ps.points.row(i) - ps.points.row(j)).norm();
}

PointSet generate_square(int n, double noise, std::uint64_t seed) {
  if (n < 3) raise(errc::too_few_points, "n must be >= 3");
  if (noise < 0.0) raise(errc::invalid_argument, "noise must be >= 0");
  Rng rng(seed);
  PointSet ps;
  ps.points.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    ps.points(i, 0) = rng.uniform();
    ps.points(i, 1) = rng.uniform();
    ps.points(i, 2) = noise * rng.uniform();
  }
  return ps;
}

void save_layout_csv(const Layout& layout, const std::string& path) {
  auto f = open_for_write(path);
  for (const Point2& p : layout.coords) {
    const double row[2] = {p.x, p.y};
    write_row(f.get(), row, 2);
  }
}

Layout load_layout_csv(const std::string& path, Header header) {
  const auto rows = load_numeric_csv(path, header);
  Layout layout;
  layout.coords.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 2) {
      raise(errc::wrong_column_count,
            path + ": row " + std::to_string(i + 1) + " has " +
                std::to_string(rows[i].size()) + " columns, expected 2");
    }
    layout.coords.push_back({rows[i][0], rows[i][1]});
  }
  if (layout.coords.empty()) raise(errc::parse_error, path + ": empty file");
  return layout;
}

}  // namespace warpqi
