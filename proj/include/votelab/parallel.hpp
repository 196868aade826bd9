#pragma once

#include <cstddef>
#include <functional>

namespace votelab {

/// Worker count: VOTELAB_THREADS if set and positive, otherwise 1.
std::size_t thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend only on n and the worker count; callers write per-index results
/// and reduce serially afterwards, so output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace votelab
