#pragma once

#include <cstddef>
#include <functional>

namespace ept {

/// Worker count: EPT_THREADS when set and positive, otherwise
/// hardware_concurrency (at least 1).
int thread_count();

/// Runs fn(i) for i in [0, n) across thread_count() workers pulling from a
/// shared atomic counter. fn must be safe to call concurrently for distinct
/// indices; results should be written to preassigned slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ept
