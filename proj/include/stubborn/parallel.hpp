#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stubborn {

/// 0 means one worker per hardware thread.
unsigned resolve_worker_count(unsigned requested);

/// Calls body(i) for every i in [0, n) on up to `workers` threads. The first
/// exception thrown by any call is rethrown after all workers stop.
template <class Body>
void parallel_for(std::uint64_t n, unsigned workers, Body&& body) {
  workers = static_cast<unsigned>(
      std::min<std::uint64_t>(resolve_worker_count(workers), std::max<std::uint64_t>(n, 1)));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::uint64_t i = next++; i < n && !failed; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

/// Cycles per reduction chunk. Part of the reproducibility contract: changing
/// it changes floating-point results in the last bits.
inline constexpr std::uint64_t kReductionChunk = 4096;

/// Reduces body(acc, i) over i in [0, n). Items are folded sequentially inside
/// fixed chunks of kReductionChunk indices, then chunk results are merged in a
/// fixed pairwise tree, so the result is identical for any worker count.
template <class Acc, class Body>
Acc chunked_reduce(std::uint64_t n, unsigned workers, Body&& body) {
  const std::uint64_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<Acc> partial(chunks);
  parallel_for(chunks, workers, [&](std::uint64_t c) {
    Acc& acc = partial[c];
    const std::uint64_t end = std::min(n, (c + 1) * kReductionChunk);
    for (std::uint64_t i = c * kReductionChunk; i < end; ++i) body(acc, i);
  });
  for (std::uint64_t stride = 1; stride < chunks; stride *= 2) {
    for (std::uint64_t i = 0; i + stride < chunks; i += 2 * stride) {
      partial[i].merge(partial[i + stride]);
    }
  }
  return chunks == 0 ? Acc{} : std::move(partial[0]);
}

}  // namespace stubborn
