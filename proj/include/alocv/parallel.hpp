#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace alocv {

/// Worker count: ALOCV_THREADS if set, else hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("ALOCV_THREADS")) {
    int k = std::atoi(env);
    if (k >= 1) return k;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, count) across worker threads.
///
/// Tasks claim indices from a shared counter; each index is processed exactly
/// once and fn must only write to per-index state, so results are independent
/// of scheduling. The first exception thrown is rethrown on the caller.
inline void parallel_for_index(long count, const std::function<void(long)>& fn) {
  int workers = thread_count();
  if (workers <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  auto work = [&] {
    for (;;) {
      long i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  int spawn = static_cast<int>(std::min<long>(workers, count));
  pool.reserve(spawn);
  for (int t = 0; t < spawn; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace alocv
