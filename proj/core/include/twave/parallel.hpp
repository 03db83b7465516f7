#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace twave {

/// Runs fn(chunk_index, begin, end) over [0, n) split into fixed-size chunks.
/// The chunk layout depends only on n and chunk_size, never on the worker
/// count, so per-chunk random streams give results that are independent of
/// how many workers run.
template <class Fn>
void for_each_chunk(std::size_t n, std::size_t chunk_size, int workers, Fn&& fn) {
  if (n == 0) return;
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    fn(c, begin, std::min(n, begin + chunk_size));
  };
  const std::size_t nthreads =
      std::min<std::size_t>(chunks, static_cast<std::size_t>(std::max(1, workers)));
  if (nthreads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t c = t; c < chunks; c += nthreads) run_chunk(c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace twave
