#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace dqpt {

/// Worker count from DQPT_THREADS (0 or unset = hardware concurrency).
unsigned worker_count();

/// Calls body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend on the worker count, so bodies must write only to their own indices.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Pairwise sum with a fixed tree shape determined by the element count only.
double pairwise_sum(std::span<const double> values);

}  // namespace dqpt
