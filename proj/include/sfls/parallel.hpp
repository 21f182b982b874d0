// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace sfls {

// Worker count: `requested` if positive, else hardware concurrency, in both
// cases capped by the SURFELSOUP_THREADS environment variable when set.
inline int resolve_thread_count(int requested) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("SURFELSOUP_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1 && cap < n) n = cap;
  }
  return n;
}

// Runs fn(i) for i in [0, count) over `threads` workers on interleaved index
// strides. Results must be written to per-index slots; the partition is a
// pure function of (count, threads), so output never depends on scheduling.
inline void parallel_for(size_t count, int threads,
                         const std::function<void(size_t)>& fn) {
  if (threads <= 1 || count < 2) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  size_t workers = std::min<size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace sfls
