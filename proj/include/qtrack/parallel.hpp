#pragma once

#include <cstddef>
#include <functional>

namespace qtrack {

// Global cap on worker threads (default: hardware concurrency).
void set_max_threads(int n);
int max_threads();

// Runs fn(i) for i in [0, n) across worker threads and blocks until done.
// Callers must write results into pre-assigned slots so the outcome does
// not depend on scheduling order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qtrack
