#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace innerlevel {

// Worker cap: hardware concurrency, optionally lowered by INNERLEVEL_THREADS.
inline unsigned thread_budget() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("INNERLEVEL_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && static_cast<unsigned>(v) < n) n = static_cast<unsigned>(v);
  }
  return n;
}

// Deterministic data-parallel map: fn(i) must only touch state owned by
// index i and must not throw (catch inside fn and record per-index).
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned workers = thread_budget();
  if (workers <= 1 || n < 2048) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    std::size_t lo = static_cast<std::size_t>(t) * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace innerlevel
