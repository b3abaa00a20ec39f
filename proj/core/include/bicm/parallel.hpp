#pragma once

#include <cstddef>
#include <functional>

namespace bicm {

/// Number of worker threads actually used for a request. 0 means "all cores".
unsigned effective_threads(unsigned requested);

/// Runs fn(begin, end) over disjoint contiguous chunks of [begin, end) on up
/// to `threads` workers. Chunk boundaries depend only on the range and the
/// worker count, and callers are expected to write results into per-index
/// slots and reduce sequentially afterwards, which keeps every reduction
/// order-deterministic regardless of scheduling.
void parallel_for_chunks(std::size_t begin, std::size_t end, unsigned threads,
                         const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace bicm
