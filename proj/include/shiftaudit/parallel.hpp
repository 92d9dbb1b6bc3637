#ifndef SHIFTAUDIT_PARALLEL_HPP
#define SHIFTAUDIT_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace shiftaudit {

// Worker count: SHIFT_AUDIT_THREADS when set, else the logical core count.
inline unsigned worker_count() {
  if (const char* env = std::getenv("SHIFT_AUDIT_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Runs f(i) for i in [0, n) on a bounded pool. Results must be written to
// per-index slots; the first exception is rethrown after all workers join.
template <typename F>
void parallel_for(std::size_t n, unsigned workers, F&& f) {
  if (n == 0) return;
  workers = std::min<std::size_t>(workers == 0 ? 1 : workers, n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

template <typename F>
void parallel_for(std::size_t n, F&& f) {
  parallel_for(n, worker_count(), std::forward<F>(f));
}

}  // namespace shiftaudit

#endif  // SHIFTAUDIT_PARALLEL_HPP
