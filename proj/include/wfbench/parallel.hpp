#pragma once

#include <cstddef>
#include <functional>

namespace wfbench {

/// Worker count: WFBENCH_THREADS when set, otherwise the hardware count.
int worker_count();

/// Runs fn(begin, end) over a fixed chunking of [0, n). Chunk boundaries
/// depend only on n and the worker count, so per-chunk results can be
/// combined in chunk order for deterministic reductions.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t chunk, std::size_t begin,
                                              std::size_t end)>& fn);

std::size_t chunk_count(std::size_t n);

}  // namespace wfbench
