#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ciforge {

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Work items are
/// claimed dynamically; callers store results at index i so the outcome does
/// not depend on scheduling. If several items throw, the exception from the
/// lowest index is rethrown.
template <class Body>
void parallel_for(std::size_t count, std::size_t jobs, Body&& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = count;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(jobs - 1);
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  if (error) std::rethrow_exception(error);
}

}  // namespace ciforge
