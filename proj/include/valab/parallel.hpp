#pragma once

#include <cstddef>
#include <functional>

namespace valab {

/// Worker count: hardware concurrency, capped by the VALAB_THREADS environment variable.
int worker_count();

/// Runs fn(i) for i in [0, count) on up to worker_count() threads. Callers write results
/// into slot i so the merge order never depends on scheduling. The first exception thrown
/// by any task is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace valab
