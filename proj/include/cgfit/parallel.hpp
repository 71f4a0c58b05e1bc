#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cgfit {

// Global worker-count cap for parallel_for.  0 means hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

namespace detail {
unsigned resolve_thread_count(std::size_t n_tasks);
}

// Runs body(i) for i in [0, n).  Each task must write only to its own output
// slot; under that contract the result is identical for every thread count,
// including 1, because the work items are independent and pre-indexed.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  const unsigned workers = detail::resolve_thread_count(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cgfit
