#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace cfear {

/// Process-wide worker count for parallel_for. 1 (the default) runs inline
/// and is the determinism reference; results are identical for any count
/// because every loop writes disjoint, preallocated slots.
void set_num_threads(int n);
int num_threads();

namespace detail {
inline std::atomic<int>& thread_count() {
  static std::atomic<int> count{1};
  return count;
}
}  // namespace detail

inline void set_num_threads(int n) { detail::thread_count().store(n < 1 ? 1 : n); }
inline int num_threads() { return detail::thread_count().load(); }

/// Runs fn(i) for i in [0, n). Work is block-partitioned across threads;
/// fn must only touch state owned by index i.
template <typename Fn>
void parallel_for(size_t n, Fn&& fn) {
  const int workers = num_threads();
  if (workers <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const size_t used = std::min<size_t>(workers, n);
  const size_t chunk = (n + used - 1) / used;
  std::vector<std::thread> pool;
  pool.reserve(used);
  for (size_t w = 0; w < used; ++w) {
    const size_t begin = w * chunk;
    const size_t end = std::min(n, begin + chunk);
    pool.emplace_back([begin, end, &fn] {
      for (size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace cfear
