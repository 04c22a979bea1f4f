#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace soup {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index is handled
// exactly once; results must be written to per-index slots. The first
// exception (lowest index) is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = n;
  std::exception_ptr failure;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (i < failed_index) {
              failed_index = i;
              failure = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace soup
