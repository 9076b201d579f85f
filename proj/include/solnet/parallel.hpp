#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace solnet {

/// Worker count: explicit setting, else SOLNET_THREADS, else hardware concurrency.
inline int& thread_setting() {
  static int n = 0;
  return n;
}

inline int worker_count() {
  if (thread_setting() > 0) return thread_setting();
  if (const char* env = std::getenv("SOLNET_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline bool& inside_parallel_region() {
  thread_local bool flag = false;
  return flag;
}

/// Runs body(i) for i in [0, n); nested calls run serially. Results must be written to disjoint slots, which keeps
/// output independent of the thread count.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  int workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1 || n < 2 || inside_parallel_region()) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      inside_parallel_region() = true;
      try {
        for (std::size_t i = next++; i < n; i = next++) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace solnet
