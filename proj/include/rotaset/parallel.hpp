#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace rotaset {

// Worker-pool size used by the compute modules. The CLI sets this from
// --threads; ROTASET_THREADS is the environment fallback.
inline int& worker_threads() {
  static int n = [] {
    if (const char* env = std::getenv("ROTASET_THREADS")) {
      int v = std::atoi(env);
      if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }();
  return n;
}

// Static block partition of [0, count). Results must be written to
// caller-owned slots indexed by i so the outcome is thread-count independent.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  int threads = worker_threads();
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::size_t nthreads = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::size_t chunk = (count + nthreads - 1) / nthreads;
  for (std::size_t t = 0; t < nthreads; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace rotaset
