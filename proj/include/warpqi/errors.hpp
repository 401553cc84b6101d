#pragma once

#include <stdexcept>
#include <string>

namespace warpqi {

enum class errc {
  fewer_than_three_points,
  all_points_collinear,
  negative_side_length,
  triangle_inequality_violated,
  all_areas_zero,
  all_distances_zero,
  k_too_large,
  parse_error,
  ragged_rows,
  non_finite,
  not_square,
  not_symmetric,
  negative_entry,
  non_zero_diagonal,
  wrong_column_count,
  index_out_of_range,
  perplexity_too_large,
  too_few_points,
  empty_triangulation,
  size_mismatch,
  file_not_found,
  invalid_argument,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) {
  throw Error(code, std::string(errc_name(code)) + ": " + msg);
}

}  // namespace warpqi
