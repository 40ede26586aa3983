#include "spudd/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spudd {

namespace {

int default_threads() {
  if (const char* env = std::getenv("SPUDD_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<int>& threads_setting() {
  static std::atomic<int> n{default_threads()};
  return n;
}

}  // namespace

int thread_count() { return threads_setting().load(); }

void set_thread_count(int n) { threads_setting().store(std::max(1, n)); }

void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body) {
  if (end <= begin) return;
  const std::size_t total = end - begin;
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(thread_count(), total));
  if (workers <= 1) {
    for (std::size_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  // Dynamic chunking balances uneven per-index cost; output slots stay per index.
  const std::size_t chunk = std::max<std::size_t>(1, std::min<std::size_t>(64, total / (8 * workers)));
  std::atomic<std::size_t> next{begin};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (;;) {
          const std::size_t lo = next.fetch_add(chunk);
          if (lo >= end) break;
          const std::size_t hi = std::min(end, lo + chunk);
          for (std::size_t i = lo; i < hi; ++i) body(i);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(end);
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace spudd
