#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace brw {

// Runs fn(begin, end, chunk_index) over [0, n) split into fixed-size
// chunks handed out through an atomic counter. Chunk boundaries depend
// only on n and chunk_size, never on the worker count, so callers that
// write per-chunk slots and reduce them in index order get bit-identical
// results for any thread count.
template <typename Fn>
void parallel_chunks(long n, long chunk_size, int threads, Fn&& fn) {
  const long n_chunks = (n + chunk_size - 1) / chunk_size;
  if (threads <= 1 || n_chunks <= 1) {
    for (long c = 0; c < n_chunks; ++c)
      fn(c * chunk_size, std::min(n, (c + 1) * chunk_size), c);
    return;
  }
  std::atomic<long> next{0};
  auto worker = [&] {
    for (;;) {
      const long c = next.fetch_add(1);
      if (c >= n_chunks) return;
      fn(c * chunk_size, std::min(n, (c + 1) * chunk_size), c);
    }
  };
  std::vector<std::thread> pool;
  const int nw = static_cast<int>(std::min<long>(threads, n_chunks));
  pool.reserve(static_cast<std::size_t>(nw));
  for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace brw
