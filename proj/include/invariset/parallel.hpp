#pragma once

// Deterministic index-parallel loops.
//
// parallel_for(n, workers, fn) invokes fn(i) exactly once for each i in
// [0, n).  Callers must write only to slot i of shared output (or otherwise
// touch disjoint state), which keeps results bitwise independent of the
// worker count and of scheduling order.  Reductions belong after the loop,
// in deterministic index order.

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace invariset {

inline unsigned default_workers() noexcept {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  if (static_cast<std::size_t>(workers) > n)
    workers = static_cast<unsigned>(n);

  // Dynamic chunking: uneven per-index costs (trajectories retire at
  // different horizons) would starve static partitions.
  constexpr std::size_t kGrain = 32;
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto run = [&]() {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(kGrain);
        if (begin >= n) return;
        const std::size_t end = begin + kGrain < n ? begin + kGrain : n;
        for (std::size_t i = begin; i < end; ++i) fn(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace invariset
