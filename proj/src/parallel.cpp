#include "cgfit/parallel.hpp"

#include <algorithm>

namespace cgfit {

namespace {
std::atomic<unsigned> g_max_threads{0};
}

void set_max_threads(unsigned n) { g_max_threads.store(n); }

unsigned max_threads() {
  const unsigned cap = g_max_threads.load();
  if (cap != 0) return cap;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace detail {
unsigned resolve_thread_count(std::size_t n_tasks) {
  return static_cast<unsigned>(
      std::min<std::size_t>(max_threads(), std::max<std::size_t>(n_tasks, 1)));
}
}  // namespace detail

}  // namespace cgfit
