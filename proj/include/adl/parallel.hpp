#pragma once

#include <cstddef>
#include <functional>

namespace adl {

// Worker count: hardware concurrency, capped by the ADL_THREADS environment
// variable when it is set to a positive integer.
std::size_t worker_count();

// Runs body(chunk) for every chunk in [0, n_chunks). Chunks are claimed
// dynamically by up to worker_count() threads; body must only write to
// chunk-local state. The first exception thrown by any chunk is rethrown.
void parallel_chunks(std::size_t n_chunks, const std::function<void(std::size_t)>& body);

}  // namespace adl
