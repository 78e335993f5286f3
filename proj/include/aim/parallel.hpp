#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace aim {

// Worker count for instance-parallel loops; AIM_THREADS overrides detection.
inline int hardware_workers() {
  if (const char* env = std::getenv("AIM_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Runs fn(i) for i in [0, count) across workers. Callers keep determinism by
// writing results into slot i and merging in index order afterwards. The
// first exception thrown by any task is rethrown after all workers stop.
template <typename Fn>
void parallel_for(long long count, Fn&& fn, int workers = hardware_workers()) {
  if (count <= 0) return;
  if (workers > count) workers = static_cast<int>(count);
  if (workers <= 1) {
    for (long long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long long> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!stop.load(std::memory_order_relaxed)) {
        long long i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          stop.store(true, std::memory_order_relaxed);
          break;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace aim
