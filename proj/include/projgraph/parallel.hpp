#pragma once

#include <cstddef>
#include <functional>

namespace projgraph {

/// Worker cap used by all parallel loops. 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(begin, end) over disjoint contiguous chunks of [0, count).
/// Chunk boundaries depend only on count, never on the worker count, so any
/// per-chunk partial results combined in chunk order are reproducible.
void parallel_chunks(std::size_t count, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& body);

/// Runs body(i) for every i in [0, count). Writes must go to slot i only.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace projgraph
