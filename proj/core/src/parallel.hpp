#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "mlspgemm/csr_matrix.hpp"

namespace mlspgemm::detail {

inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(worker, row) over [0, n) with rows claimed in blocks from a
/// shared counter. Per-row work is sequential, so results do not depend on
/// the worker count. The first exception thrown by any worker is rethrown.
template <class Init, class Body>
void parallel_rows(index_t n, unsigned workers, Init&& init, Body&& body) {
  constexpr index_t kBlock = 64;
  workers = static_cast<unsigned>(std::min<index_t>(workers, std::max<index_t>(1, (n + kBlock - 1) / kBlock)));
  std::atomic<index_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto run = [&](unsigned worker) {
    try {
      auto state = init(worker);
      for (;;) {
        const index_t begin = next.fetch_add(kBlock, std::memory_order_relaxed);
        if (begin >= n) break;
        const index_t end = std::min(n, begin + kBlock);
        for (index_t row = begin; row < end; ++row) body(state, row);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(n, std::memory_order_relaxed);
    }
  };

  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) threads.emplace_back(run, w);
    run(0);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mlspgemm::detail
