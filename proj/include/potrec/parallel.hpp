#pragma once

#include <cstddef>
#include <functional>

namespace potrec {

/// Worker count from POTREC_WORKERS, else the hardware concurrency (at least 1).
unsigned worker_count();

/// Splits [0, count) into contiguous blocks, one per worker, and runs
/// body(begin, end) on each. Blocks are disjoint, so bodies that only write
/// their own slice give results independent of the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace potrec
