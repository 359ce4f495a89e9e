#pragma once

#include <functional>

namespace shapegeo {

/// Worker count: SHAPEGEO_THREADS if set (>= 1), else hardware concurrency.
int thread_count();

/// Runs body(i) for i in [0, n). Iterations are split into contiguous blocks;
/// results must be written to per-index slots so output does not depend on the
/// number of workers. The exception from the lowest failing index is rethrown.
void parallel_for(int n, const std::function<void(int)>& body, int min_per_thread = 1);

} // namespace shapegeo
