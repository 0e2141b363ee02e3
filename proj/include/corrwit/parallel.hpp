#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace corrwit {

namespace detail {
inline std::atomic<int>& default_threads_slot() {
  static std::atomic<int> n{1};
  return n;
}
}  // namespace detail

/// Worker count used by grid scans when callers pass 0. `n == 0` selects hardware concurrency.
inline void set_default_threads(int n) {
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  detail::default_threads_slot() = n;
}

inline int default_threads() { return detail::default_threads_slot(); }

/// Evaluates f(0..n-1) and returns results in index order regardless of scheduling.
/// The first exception thrown by any item is rethrown after all workers finish.
template <typename F>
auto parallel_map(std::size_t n, F&& f, int threads = 0) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<R> out(n);
  if (threads <= 0) threads = default_threads();
  threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          out[i] = f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace corrwit
