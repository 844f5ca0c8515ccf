#pragma once

#include <cstddef>
#include <functional>

namespace panscope {

/// Worker count: PANSCOPE_THREADS if set and non-zero, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, count). Each index is handled exactly once;
/// callers write results into per-index slots so the outcome does not depend
/// on scheduling. The first exception thrown by a body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace panscope
