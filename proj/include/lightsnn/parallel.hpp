#pragma once

#include <cstddef>
#include <functional>

namespace lightsnn {

/// Worker count from LIGHTSNN_THREADS; unset, 0 or invalid means
/// hardware concurrency.
std::size_t thread_count_from_env();

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Each index runs
/// exactly once; the first exception thrown is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace lightsnn
