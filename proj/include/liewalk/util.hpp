#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace liewalk {

/// Runs fn(i) for i in [0, n).  With threads <= 1 this is a plain loop; with
/// more threads the index range is split into contiguous chunks.  Results are
/// deterministic as long as fn(i) only writes to slot i of preallocated
/// storage (which is how every caller in this codebase uses it).
inline void parallel_for(std::int64_t n, int threads,
                         const std::function<void(std::int64_t)>& fn) {
  if (n <= 0) return;
  if (threads <= 1 || n == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(std::min<std::int64_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::int64_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = w * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// ceil(x) that forgives 1-ulp noise around integers (e.g. 0.35 * 20).
inline long robust_ceil(double x, double eps = 1e-9) {
  const double f = std::floor(x + eps);
  if (x - f <= eps) return static_cast<long>(f);
  return static_cast<long>(std::ceil(x - eps));
}

}  // namespace liewalk
