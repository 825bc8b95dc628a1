#pragma once

#include <cstddef>
#include <functional>

namespace ecmmd {

/// Worker count: ECMMD_THREADS if set to a positive integer, otherwise the
/// hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, count). Each index is handled exactly once, so
/// writes to per-index slots stay deterministic. Nested calls run serially.
/// The first exception thrown by any body is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ecmmd
