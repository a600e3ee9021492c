#pragma once

#include <cstdint>
#include <functional>

namespace sap {

// Worker count used by the data-parallel kernels. 0 restores the default
// (hardware concurrency). Thread count only affects wall time: every kernel
// partitions work into blocks whose boundaries depend on the problem size
// alone, and combines per-block results in block order, so outputs are
// byte-identical for any worker count.
int worker_count();
void set_worker_count(int workers);

// Runs fn(block_index, begin, end) for each block of `block_size` items
// covering [0, count). Blocks are claimed dynamically; fn must only write
// state owned by its block.
void parallel_blocks(std::int64_t count, std::int64_t block_size,
                     const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn);

std::int64_t block_count(std::int64_t count, std::int64_t block_size);

}  // namespace sap
