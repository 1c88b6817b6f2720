#pragma once

#include <cstddef>
#include <functional>

namespace btl {

// Worker count for embarrassingly parallel loops; capped by the BTL_THREADS
// environment variable (1 disables threading).
int worker_threads();

// Runs body(0..n-1) across worker_threads() threads. Each index must write
// only to its own output slot, so results are independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace btl
