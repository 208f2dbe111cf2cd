#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace communitylens {

/// Runs chunked loops on a fixed number of worker threads.
///
/// Work is split into chunks whose boundaries depend only on the problem
/// size and the chunk size, never on the thread count. Callers that write
/// per-chunk results and combine them in chunk order therefore get the same
/// bytes for any number of threads.
class Executor {
 public:
  explicit Executor(unsigned threads = 1) : threads_(std::max(1u, threads)) {}

  unsigned threads() const { return threads_; }

  static std::size_t chunk_count(std::size_t n, std::size_t chunk) { return chunk == 0 ? 0 : (n + chunk - 1) / chunk; }

  /// Calls fn(chunk_index, begin, end) for every chunk of [0, n).
  void for_chunks(std::size_t n, std::size_t chunk,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) const {
    const std::size_t chunks = chunk_count(n, chunk);
    if (chunks == 0) return;
    auto run_chunk = [&](std::size_t c) { fn(c, c * chunk, std::min(n, (c + 1) * chunk)); };
    if (threads_ == 1 || chunks == 1) {
      for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
      return;
    }
    std::mutex mu;
    std::size_t next = 0;
    std::exception_ptr failure;
    auto worker = [&] {
      for (;;) {
        std::size_t c;
        {
          std::lock_guard lock(mu);
          if (next >= chunks || failure) return;
          c = next++;
        }
        try {
          run_chunk(c);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    std::vector<std::jthread> pool;
    const unsigned spawn = static_cast<unsigned>(std::min<std::size_t>(threads_, chunks));
    pool.reserve(spawn);
    for (unsigned t = 0; t < spawn; ++t) pool.emplace_back(worker);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  /// Runs independent tasks; result order is the task order.
  void run_all(const std::vector<std::function<void()>>& tasks) const {
    for_chunks(tasks.size(), 1, [&](std::size_t, std::size_t b, std::size_t) { tasks[b](); });
  }

 private:
  unsigned threads_;
};

}  // namespace communitylens
