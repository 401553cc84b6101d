#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace warpqi::detail {

// Worker count: WARPQI_THREADS caps it, otherwise hardware concurrency.
inline int thread_budget() {
  if (const char* env = std::getenv("WARPQI_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(std::min(v, 256L));
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

// Runs fn(block_index, begin, end) over fixed-size blocks of [0, n).
// Block boundaries do not depend on the thread count, so per-block partial
// results are reproducible; callers combine partials in block order to keep
// floating-point reductions deterministic. fn must not throw.
template <typename Fn>
void parallel_blocks(std::size_t n, std::size_t block, Fn&& fn) {
  if (n == 0) return;
  const std::size_t nblocks = (n + block - 1) / block;
  const int nthreads =
      static_cast<int>(std::min<std::size_t>(thread_budget(), nblocks));
  if (nthreads <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) {
      fn(b, b * block, std::min(n, (b + 1) * block));
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= nblocks) break;
      fn(b, b * block, std::min(n, (b + 1) * block));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads - 1);
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace warpqi::detail
