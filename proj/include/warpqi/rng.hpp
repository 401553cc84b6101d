#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace warpqi {

// Seedable, portable random stream: mt19937_64 with uniform doubles taken
// from the top 53 bits of each draw and normals via Box-Muller. The standard
// distribution adapters are implementation-defined, so they are avoided here;
// a given seed produces the same stream on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1), one generator draw.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal. Box-Muller consumes two draws and yields two values;
  // the second is cached, so consecutive calls use one draw on average.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace warpqi
