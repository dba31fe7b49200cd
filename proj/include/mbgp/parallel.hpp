#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace mbgp {

/// Chunk length for reductions. Fixed so that results do not depend on the
/// thread count.
inline constexpr std::size_t kReductionChunk = 1024;

/// Sums `values` in fixed-size chunks and then combines the chunk totals
/// pairwise. Deterministic for a given input order and dispatched ISA.
double deterministic_sum(std::span<const double> values);

/// Calls fn(begin, end, worker) over [0, count) split into `chunk`-sized
/// pieces. With threads <= 1 everything runs inline on the caller. The first
/// exception thrown by any worker is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t count, std::size_t chunk, int threads, Fn&& fn) {
  if (count == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t pieces = (count + chunk - 1) / chunk;
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || pieces == 1) {
    for (std::size_t b = 0; b < count; b += chunk) fn(b, std::min(count, b + chunk), std::size_t{0});
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&](std::size_t worker) {
    try {
      for (std::size_t p = next.fetch_add(1); p < pieces; p = next.fetch_add(1)) {
        const std::size_t b = p * chunk;
        fn(b, std::min(count, b + chunk), worker);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t spawned = std::min(workers, pieces);
    pool.reserve(spawned - 1);
    for (std::size_t w = 1; w < spawned; ++w) pool.emplace_back(body, w);
    body(0);
  }
  if (failure) std::rethrow_exception(failure);
}

} // namespace mbgp
