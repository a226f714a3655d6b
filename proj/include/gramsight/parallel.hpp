#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace gramsight {

// Worker budget. GRAMSIGHT_THREADS caps it; 0/unset means hardware default.
inline size_t max_threads() {
  size_t hw = std::max<size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GRAMSIGHT_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return std::min<size_t>(static_cast<size_t>(v), hw);
  }
  return hw;
}

// Static index partition; fn(i) must only touch state owned by index i so the
// result is independent of scheduling.
template <typename Fn>
void parallel_for(size_t n, Fn&& fn, size_t threads = 0) {
  if (threads == 0) threads = max_threads();
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (size_t i = t; i < n; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace gramsight
