#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace blochball {

// Runs fn(i) for i in [0, count) across hardware threads. Each item writes
// only to its own slot, so results are identical to the serial order and
// reductions stay deterministic.
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t)>& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw < 2 || count < 4) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  unsigned workers = hw < count ? hw : static_cast<unsigned>(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace blochball
