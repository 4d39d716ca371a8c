#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace curstat {

/// Number of worker threads to use when the caller asked for `requested`
/// (0 means one per hardware thread).
inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) on up to `threads` threads. Work is split
/// into contiguous chunks; body must only write to slot i of its outputs so
/// the result does not depend on the schedule. The first exception thrown by
/// any worker is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace curstat
