#include "sap/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "sap/errors.hpp"

namespace sap {

namespace {
std::atomic<int> g_workers{0};

int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}
}  // namespace

int worker_count() {
  const int w = g_workers.load(std::memory_order_relaxed);
  return w > 0 ? w : default_workers();
}

void set_worker_count(int workers) {
  if (workers < 0) throw InvalidArgument("worker count must be >= 0");
  g_workers.store(workers, std::memory_order_relaxed);
}

std::int64_t block_count(std::int64_t count, std::int64_t block_size) {
  return count <= 0 ? 0 : (count + block_size - 1) / block_size;
}

void parallel_blocks(std::int64_t count, std::int64_t block_size,
                     const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn) {
  if (count <= 0) return;
  if (block_size <= 0) throw InvalidArgument("block_size must be positive");

  const std::int64_t nblocks = block_count(count, block_size);
  auto run_block = [&](std::int64_t b) {
    const std::int64_t begin = b * block_size;
    const std::int64_t end = begin + block_size < count ? begin + block_size : count;
    fn(b, begin, end);
  };

  const int workers = static_cast<int>(std::min<std::int64_t>(worker_count(), nblocks));
  if (workers <= 1) {
    for (std::int64_t b = 0; b < nblocks; ++b) run_block(b);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::int64_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= nblocks) return;
      try {
        run_block(b);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sap
