#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rvol {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs f(i) for i in [0, n) split into contiguous chunks, one per worker.
// Results must be written to disjoint slots indexed by i, which makes the
// output independent of the worker count. The first exception thrown by any
// worker is rethrown on the calling thread after all workers join.
template <typename F>
void parallel_for(std::size_t n, int workers, F&& f) {
  const int w = resolve_workers(workers);
  if (n == 0) return;
  if (w <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }

  const std::size_t n_workers = std::min<std::size_t>(w, n);
  const std::size_t chunk = (n + n_workers - 1) / n_workers;

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t t = 0; t < n_workers; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi]() {
      try {
        for (std::size_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rvol
