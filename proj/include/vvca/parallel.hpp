#pragma once

#include <cstddef>
#include <functional>

namespace vvca {

/// Worker count for parallel_for; initialized from VVCA_THREADS or
/// hardware concurrency. Results never depend on it.
int thread_count();
void set_thread_count(int count);

/// Runs fn(begin, end) over a contiguous partition of [0, count).
/// Stays inline when count < grain. Callers must write to disjoint
/// locations so output is identical for any worker count.
void parallel_for(std::size_t count, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn);

/// Left fold of fixed 1024-element blocks, each block summed by
/// recursive halving. The grouping depends only on element order, so
/// chunked/streaming accumulation reproduces the same value as long as
/// chunk boundaries fall on block edges.
inline constexpr std::size_t kSumBlock = 1024;
double block_pairwise_sum(const double* data, std::size_t count);

}  // namespace vvca
