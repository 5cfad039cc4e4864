#ifndef DPPLAB_THREADS_HPP
#define DPPLAB_THREADS_HPP

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace dpp {

// Worker-count resolution: explicit request > DPPLAB_THREADS env > hardware.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DPPLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n). Each index writes only its own output slot, so
// results are identical for any worker count.
inline void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next(0);
  auto worker = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int k = static_cast<int>(std::min<long>(threads, n));
  pool.reserve(k);
  for (int t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace dpp

#endif
