#pragma once

#include <cstddef>
#include <functional>

namespace fluidex {

// Worker count: FLUIDEX_THREADS if set (>= 1), else hardware concurrency.
int worker_count();

// Static contiguous partition of [0, n) across workers. Each index is
// visited exactly once; the first exception thrown is rethrown after join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fluidex
