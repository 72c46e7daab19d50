#include "vvca/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace vvca {

namespace {

int default_threads() {
  if (const char* env = std::getenv("VVCA_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

std::atomic<int> g_threads{0};

}  // namespace

int thread_count() {
  int v = g_threads.load(std::memory_order_relaxed);
  if (v == 0) {
    v = default_threads();
    g_threads.store(v, std::memory_order_relaxed);
  }
  return v;
}

void set_thread_count(int count) {
  g_threads.store(std::max(1, count), std::memory_order_relaxed);
}

void parallel_for(std::size_t count, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, count / std::max<std::size_t>(1, grain)));
  if (workers <= 1) {
    fn(0, count);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  std::exception_ptr error;
  std::atomic_flag error_set = ATOMIC_FLAG_INIT;
  auto run = [&](std::size_t lo, std::size_t hi) {
    try {
      fn(lo, hi);
    } catch (...) {
      if (!error_set.test_and_set()) error = std::current_exception();
    }
  };
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    if (lo >= count) break;
    threads.emplace_back(run, lo, std::min(count, lo + chunk));
  }
  run(0, std::min(count, chunk));
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

double block_pairwise_sum(const double* data, std::size_t count) {
  // Recursive halving inside one block.
  auto pairwise = [](const double* d, std::size_t n, auto&& self) -> double {
    if (n <= 8) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += d[i];
      return s;
    }
    const std::size_t half = n / 2;
    return self(d, half, self) + self(d + half, n - half, self);
  };
  double total = 0.0;
  std::size_t offset = 0;
  while (offset < count) {
    const std::size_t n = std::min(kSumBlock, count - offset);
    total += pairwise(data + offset, n, pairwise);
    offset += n;
  }
  return total;
}

}  // namespace vvca
