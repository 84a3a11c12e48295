#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace qbaker {

namespace detail {
inline std::atomic<unsigned>& thread_limit_storage() {
  static std::atomic<unsigned> limit{0};
  return limit;
}
}  // namespace detail

// 0 means "use hardware concurrency".
inline void set_thread_limit(unsigned limit) { detail::thread_limit_storage() = limit; }

inline unsigned thread_limit() {
  unsigned limit = detail::thread_limit_storage();
  if (limit == 0) limit = std::max(1u, std::thread::hardware_concurrency());
  return limit;
}

// Runs fn(i) for i in [0, count). Units must not share mutable state.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_limit(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace qbaker
