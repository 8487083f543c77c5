#pragma once

#include <cstddef>
#include <functional>

namespace balkit {

/// Number of worker threads used by parallel_for. Reads BALKIT_THREADS
/// (values < 1 are ignored) and falls back to the hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, count). Each index is handled by exactly one
/// thread and results must be written to per-index slots, so the output is
/// identical for any thread count. The first exception thrown by any body
/// is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace balkit
