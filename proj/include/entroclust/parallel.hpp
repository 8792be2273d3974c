#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace entroclust {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
// computed exactly once into caller-owned slots, so results are identical to
// the serial run regardless of thread count; any reduction happens in the
// caller, in index order.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t worker_count = static_cast<std::size_t>(threads);
  if (worker_count > n) worker_count = n;
  std::vector<std::thread> workers;
  workers.reserve(worker_count);
  std::vector<std::exception_ptr> errors(worker_count);
  for (std::size_t w = 0; w < worker_count; ++w) {
    std::size_t begin = n * w / worker_count;
    std::size_t end = n * (w + 1) / worker_count;
    workers.emplace_back([&, w, begin, end]() {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : workers) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace entroclust
